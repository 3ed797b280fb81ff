"""Fourier dictionary between differential polynomials and the p^a_b variables.

The substitution u_{k1,k2} -> sum_{(a,b)} (ib)^k1 (ia)^k2 p^a_b e^{i(ay + bx)}
turns a density into a polynomial in the p's graded by frequency (sum a, sum b).
A density is zero as a local functional iff its frequency-(0,0) part vanishes
for every choice of labels.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from functools import lru_cache
from math import factorial, prod
from typing import Iterable

from ..exactalg import JET_BASE, DiffPoly, Scalar
from ..exactalg.scalar import I
from ..hierarchy import LocalFunctional

__all__ = [
    "FourierPoly",
    "fourier_substitute",
    "functional_equal",
    "functional_is_zero",
    "constant_coefficient",
    "automorphism_count",
]

Pair = tuple[int, int]


def automorphism_count(pairs: Iterable[Pair]) -> int:
    """Order of the symmetry group of a multiset of labels."""
    return prod(factorial(m) for m in Counter(pairs).values())


class FourierPoly:
    """Polynomial in the p^a_b with eps/mu exponents.

    Keys are ``(pairs, eps, mu)`` with ``pairs`` a sorted tuple of (a, b)
    labels (repetition allowed); the frequency of a key is the componentwise
    sum of its labels.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @staticmethod
    def frequency(key) -> Pair:
        pairs = key[0]
        return (sum(p[0] for p in pairs), sum(p[1] for p in pairs))

    def constant_part(self) -> "FourierPoly":
        return FourierPoly({k: v for k, v in self.terms.items() if self.frequency(k) == (0, 0)})

    def at_frequency(self, freq: Pair) -> "FourierPoly":
        return FourierPoly({k: v for k, v in self.terms.items() if self.frequency(k) == tuple(freq)})

    def coefficient(self, pairs: Iterable[Pair], eps: int = 0, mu: int = 0) -> Scalar:
        key = (tuple(sorted(tuple(p) for p in pairs)), eps, mu)
        return self.terms.get(key, Scalar(0))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FourierPoly):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "FourierPoly") -> "FourierPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return FourierPoly(out)

    def __neg__(self):
        return FourierPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "FourierPoly") -> "FourierPoly":
        out: dict = {}
        for (p1, e1, m1), c1 in self.terms.items():
            for (p2, e2, m2), c2 in other.terms.items():
                key = (tuple(sorted(p1 + p2)), e1 + e2, m1 + m2)
                c = c1 * c2
                out[key] = out[key] + c if key in out else c
        return FourierPoly(out)

    def scale(self, s) -> "FourierPoly":
        s = Scalar.coerce(s)
        return FourierPoly({k: v * s for k, v in self.terms.items()})

    def sorted_items(self):
        return sorted(self.terms.items())

    def to_json(self) -> list:
        return [
            {"c": c.to_json(), "eps": e, "mu": m, "p": [list(p) for p in pairs]}
            for (pairs, e, m), c in self.sorted_items()
        ]

    def __repr__(self):
        if not self.terms:
            return "FourierPoly(0)"
        parts = []
        for (pairs, e, m), c in self.sorted_items():
            ps = "*".join(f"p[{a},{b}]" for a, b in pairs) or "1"
            parts.append(f"({c})*eps^{e}*mu^{m}*{ps}")
        return "FourierPoly(" + " + ".join(parts) + ")"


def _jet_weight(code: int, a: int, b: int) -> Scalar:
    kx, ky = divmod(code, JET_BASE)
    return (I ** (kx + ky)) * Scalar(b**kx * a**ky)


def fourier_substitute(f: DiffPoly, support: Iterable[Pair]) -> FourierPoly:
    """Substitute u_{k1,k2} -> sum over the support of (ib)^k1 (ia)^k2 p^a_b."""
    support = sorted({(int(a), int(b)) for a, b in support})
    weights: dict[int, list] = {}
    out: dict = {}
    for (jets, e, m), c in f._terms.items():
        partial = {(): c}
        for code in jets:
            if code not in weights:
                weights[code] = [(p, _jet_weight(code, *p)) for p in support]
            nxt: dict = {}
            for pairs, v in partial.items():
                for p, w in weights[code]:
                    if not w:
                        continue
                    key = tuple(sorted(pairs + (p,)))
                    x = v * w
                    nxt[key] = nxt[key] + x if key in nxt else x
            partial = nxt
        for pairs, v in partial.items():
            key = (pairs, e, m)
            out[key] = out[key] + v if key in out else v
    return FourierPoly(out)


def constant_coefficient(f: DiffPoly, pairs: Iterable[Pair], eps: int, mu: int) -> Scalar:
    """Coefficient of eps^eps mu^mu prod p^{a_j}_{b_j} in the substitution of f.

    Only monomials of f with matching jet count and exponents can contribute,
    so the others are skipped before expanding.
    """
    pairs = sorted((int(a), int(b)) for a, b in pairs)
    n = len(pairs)
    sub = f.filter(lambda j, e, m: len(j) == n and e == eps and m == mu)
    return fourier_substitute(sub, set(pairs)).coefficient(pairs, eps, mu)


# exact test on the hyperplane sum(labels) = 0


@lru_cache(maxsize=None)
def _neg_sum_power(k: int, nvars: int) -> tuple:
    """(-(x_0 + ... + x_{nvars-1}))^k as a tuple of (exponents, coefficient)."""
    if nvars == 0:
        return (((), 1),) if k == 0 else ()
    sign = -1 if k % 2 else 1
    out = []
    for cut in itertools.combinations(range(k + nvars - 1), nvars - 1):
        bounds = (-1,) + cut + (k + nvars - 1,)
        exps = tuple(bounds[i + 1] - bounds[i] - 1 for i in range(nvars))
        coeff = factorial(k) // prod(factorial(x) for x in exps)
        out.append((exps, sign * coeff))
    return tuple(out)


def _group_polynomial(monomials: list, J: int) -> dict:
    """Constant-frequency coefficient of a group as a polynomial in free labels.

    Labels 0..J-2 are free; the last one is fixed by the zero-sum condition.
    Keys are exponent tuples (b_0..b_{J-2}, a_0..a_{J-2}).
    """
    poly: dict = defaultdict(lambda: Scalar(0))
    n = J - 1
    for jets, c in monomials:
        decoded = [divmod(code, JET_BASE) for code in jets]
        weight = Scalar(prod(factorial(m) for m in Counter(decoded).values()))
        cw = c * weight
        for arrangement in set(itertools.permutations(decoded)):
            bx = tuple(kx for kx, _ in arrangement[:n])
            ay = tuple(ky for _, ky in arrangement[:n])
            kx_last, ky_last = arrangement[-1]
            for eb, cb in _neg_sum_power(kx_last, n):
                for ea, ca in _neg_sum_power(ky_last, n):
                    key = tuple(x + y for x, y in zip(bx, eb)) + tuple(x + y for x, y in zip(ay, ea))
                    poly[key] = poly[key] + cw * Scalar(cb * ca)
    return {k: v for k, v in poly.items() if v}


def _groups(f: DiffPoly) -> dict:
    groups: dict = defaultdict(list)
    for (jets, e, m), c in f._terms.items():
        if not jets:
            continue  # constants are quotiented out
        sx = sum(code // JET_BASE for code in jets)
        sy = sum(code % JET_BASE for code in jets)
        groups[(len(jets), e, m, sx, sy)].append((jets, c))
    return groups


def _evaluate(poly: dict, point: tuple) -> Scalar:
    total = Scalar(0)
    for exps, c in poly.items():
        v = prod(x**k for x, k in zip(point, exps))
        if v:
            total = total + c * Scalar(v)
    return total


def functional_is_zero(density: DiffPoly, support_bound: int | None = None) -> bool:
    """Whether ``density`` vanishes modulo Im dx + Im dy + constants.

    With ``support_bound=None`` the frequency-(0,0) coefficient is tested as a
    polynomial identity in the labels, which covers every support at once.
    With an integer bound the same polynomial is evaluated at every label
    vector whose entries satisfy |a|, |b| <= bound (cost grows like
    (2 bound + 1)^(2 (jets - 1))).
    """
    for (J, _, _, _, _), monomials in sorted(_groups(density).items()):
        poly = _group_polynomial(monomials, J)
        if not poly:
            continue
        if support_bound is None:
            return False
        rng = range(-support_bound, support_bound + 1)
        n = J - 1
        for bs in itertools.product(rng, repeat=n):
            if abs(sum(bs)) > support_bound:
                continue
            for as_ in itertools.product(rng, repeat=n):
                if abs(sum(as_)) > support_bound:
                    continue
                if _evaluate(poly, bs + as_):
                    return False
    return True


def functional_equal(F: LocalFunctional, G: LocalFunctional, support_bound: int | None = None) -> bool:
    """Equality of local functionals via their constant Fourier coefficients."""
    return functional_is_zero(F.density - G.density, support_bound)
