"""Pseudo-differential operators sum_i a_i * dx^i over the Moyal star algebra.

Operators are written in normal order (coefficients to the left of powers of
dx).  ``depth`` is the lowest power of dx that is known exactly; nothing is
stored below it.  ``depth=None`` marks an operator known exactly in full,
such as a differential operator or a finite Laurent polynomial in dx.
"""

from __future__ import annotations

import threading

from gmpy2 import mpq

from .errors import check_cancel
from .exactalg import DiffPoly, Scalar, TruncationContext, UNBOUNDED, binomial_general, const, dx, eps_power, u
from .moyal import star

__all__ = [
    "PseudoDiffOp",
    "compose",
    "identity",
    "partial_power",
    "lax_operator",
    "is_lax_operator",
    "integer_power",
    "sqrt_lax",
    "half_power",
    "positive_part",
    "negative_part",
    "op_commutator",
    "residue",
]


class PseudoDiffOp:
    """Finite Laurent expansion in dx with DiffPoly coefficients."""

    __slots__ = ("coeffs", "depth", "trunc")

    def __init__(
        self,
        coeffs: dict[int, DiffPoly] | None = None,
        depth: int | None = None,
        trunc: TruncationContext = UNBOUNDED,
    ):
        clean = {}
        for i, c in (coeffs or {}).items():
            if depth is not None and i < depth:
                continue
            if not isinstance(c, DiffPoly):
                c = const(c, trunc)
            c = c.with_trunc(trunc)
            if c:
                clean[int(i)] = c
        self.coeffs = clean
        self.depth = depth
        self.trunc = trunc

    @property
    def order(self) -> int | None:
        """Highest exponent carrying a nonzero coefficient (None for zero)."""
        return max(self.coeffs) if self.coeffs else None

    @property
    def max_order(self) -> int | None:
        return self.order

    def __getitem__(self, i: int) -> DiffPoly:
        c = self.coeffs.get(i)
        return c if c is not None else DiffPoly._make({}, self.trunc, False)

    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict(self, lowest: int) -> "PseudoDiffOp":
        """Discard exponents below ``lowest`` (the result is known down to there)."""
        depth = lowest if self.depth is None else max(lowest, self.depth)
        return PseudoDiffOp({i: c for i, c in self.coeffs.items() if i >= lowest}, depth, self.trunc)

    def _combine_depth(self, other: "PseudoDiffOp") -> int | None:
        if self.depth is None:
            return other.depth
        if other.depth is None:
            return self.depth
        return max(self.depth, other.depth)

    def __add__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        _check_trunc(self, other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return PseudoDiffOp(out, self._combine_depth(other), self.trunc)

    def __neg__(self) -> "PseudoDiffOp":
        return PseudoDiffOp({i: -c for i, c in self.coeffs.items()}, self.depth, self.trunc)

    def __sub__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        return self + (-other)

    def scale(self, s) -> "PseudoDiffOp":
        s = Scalar.coerce(s)
        return PseudoDiffOp({i: c.scale(s) for i, c in self.coeffs.items()}, self.depth, self.trunc)

    def __matmul__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.depth == other.depth

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.depth))

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "coeffs": {str(i): self.coeffs[i].to_json() for i in sorted(self.coeffs, reverse=True)},
        }

    @classmethod
    def from_json(cls, obj: dict, trunc: TruncationContext = UNBOUNDED) -> "PseudoDiffOp":
        coeffs = {int(i): DiffPoly.from_json(c, trunc) for i, c in obj["coeffs"].items()}
        return cls(coeffs, obj.get("depth"), trunc)

    def __repr__(self):
        if not self.coeffs:
            return "PseudoDiffOp(0)"
        parts = [f"({self.coeffs[i]})*D^{i}" for i in sorted(self.coeffs, reverse=True)]
        tail = "" if self.depth is None else f" + O(D^{self.depth - 1})"
        return "PseudoDiffOp(" + " + ".join(parts) + tail + ")"


def _check_trunc(a: PseudoDiffOp, b: PseudoDiffOp) -> None:
    if a.trunc != b.trunc:
        raise ValueError(f"mismatched truncation windows: {a.trunc} vs {b.trunc}")


def identity(trunc: TruncationContext = UNBOUNDED) -> PseudoDiffOp:
    return PseudoDiffOp({0: const(1, trunc)}, None, trunc)


def partial_power(n: int, trunc: TruncationContext = UNBOUNDED) -> PseudoDiffOp:
    """The operator dx^n (exact for any integer n)."""
    return PseudoDiffOp({n: const(1, trunc)}, None, trunc)


class _DxTower:
    """Cached dx^k of one coefficient."""

    def __init__(self, f: DiffPoly):
        self._seq = [f]

    def __call__(self, k: int) -> DiffPoly:
        while len(self._seq) <= k:
            self._seq.append(dx(self._seq[-1]))
        return self._seq[k]


def _jet_free(f: DiffPoly) -> bool:
    return all(not key[0] for key in f._terms)


def compose(
    A: PseudoDiffOp,
    B: PseudoDiffOp,
    depth: int | None = None,
    cancel: threading.Event | None = None,
) -> PseudoDiffOp:
    """Operator product with (f dx^i)(g dx^j) = sum_k C(i,k) (f * dx^k g) dx^(i+j-k).

    The result is exact down to the returned ``depth``: the tightest of the
    requested cutoff and the orders the truncated inputs can still determine.
    """
    _check_trunc(A, B)
    trunc = A.trunc
    if A.is_zero() or B.is_zero():
        cands = [x for x in (A.depth, B.depth, depth) if x is not None]
        return PseudoDiffOp({}, max(cands) if cands else None, trunc)
    cands = []
    if A.depth is not None:
        cands.append(A.depth + B.order)
    if B.depth is not None:
        cands.append(B.depth + A.order)
    if depth is not None:
        cands.append(depth)
    out_depth = max(cands) if cands else None

    bottom = out_depth
    if bottom is None:
        lowB = min(B.coeffs)
        infinite = any(i < 0 for i in A.coeffs) and not all(_jet_free(g) for g in B.coeffs.values())
        if infinite:
            raise ValueError("composition has an infinite expansion; pass a depth")
        bottom = min((lowB if i >= 0 else i + lowB) for i in A.coeffs)

    towers = {j: _DxTower(g) for j, g in B.coeffs.items()}
    out: dict[int, DiffPoly] = {}
    for i, f in sorted(A.coeffs.items(), reverse=True):
        for m in range(i + B.order, bottom - 1, -1):
            check_cancel(cancel)
            acc = None
            for j in towers:
                k = i + j - m
                if k < 0 or (i >= 0 and k > i):
                    continue
                c = binomial_general(i, k)
                if not c:
                    continue
                term = towers[j](k)
                if not term:
                    continue
                if c != 1:
                    term = term.scale(Scalar._raw(c, mpq(0)))
                acc = term if acc is None else acc + term
            if acc is None or not acc:
                continue
            prod = star(f, acc)
            if prod:
                out[m] = out[m] + prod if m in out else prod
    return PseudoDiffOp(out, out_depth, trunc)


def lax_operator(trunc: TruncationContext = UNBOUNDED) -> PseudoDiffOp:
    """L = dx^2 + 2 eps^-2 u."""
    if trunc.min_eps is not None and trunc.min_eps > -2:
        raise ValueError("truncation window must admit eps^-2 for the Lax operator")
    if trunc.max_eps is not None and trunc.max_eps < 0:
        raise ValueError("truncation window must admit eps^0 for the Lax operator")
    pot = (u(trunc=trunc) * eps_power(-2, trunc)).scale(Scalar(2))
    return PseudoDiffOp({2: const(1, trunc), 0: pot}, None, trunc)


def is_lax_operator(L: PseudoDiffOp) -> bool:
    return L.depth is None and L.coeffs == lax_operator(L.trunc).coeffs


def integer_power(L: PseudoDiffOp, n: int, cancel: threading.Event | None = None) -> PseudoDiffOp:
    if n < 0:
        raise ValueError("integer_power needs n >= 0")
    out = identity(L.trunc)
    for _ in range(n):
        out = compose(out, L, cancel=cancel)
    return out


def sqrt_lax(L: PseudoDiffOp, depth: int, cancel: threading.Event | None = None) -> PseudoDiffOp:
    """Square root R = dx + sum_{i<=0} a_i dx^i of the Lax operator, down to dx^depth.

    Solved top-down: the dx^m coefficient of R o R equals 2 a_{m-1} plus terms
    built from a_1..a_m only, so each step is one exact linear solve.
    """
    if not is_lax_operator(L):
        raise ValueError("sqrt_lax expects the output of lax_operator")
    if depth > 1:
        raise ValueError("depth must be <= 1")
    trunc = L.trunc
    half = Scalar(mpq(1, 2))
    a: dict[int, DiffPoly] = {}
    towers: dict[int, _DxTower] = {}
    for m in range(1, depth, -1):
        check_cancel(cancel)
        # S_m: dx^m coefficient of R o R with the unknown a_{m-1} set to zero
        acc = towers[m](1) if m in towers else None
        for i in range(0, m - 1, -1):
            ai = a.get(i)
            if ai is None:
                continue
            G = None
            for j in range(0, m - 1, -1):
                if j not in towers:
                    continue
                k = i + j - m
                if k < 0:
                    continue
                c = binomial_general(i, k)
                term = towers[j](k)
                if not term:
                    continue
                if c != 1:
                    term = term.scale(Scalar._raw(c, mpq(0)))
                G = term if G is None else G + term
            if G is not None and G:
                prod = star(ai, G)
                acc = prod if acc is None else acc + prod
        target = L[m]
        rhs = target if acc is None else target - acc
        coeff = rhs.scale(half)
        if coeff:
            a[m - 1] = coeff
            towers[m - 1] = _DxTower(coeff)
    coeffs = {1: const(1, trunc)}
    coeffs.update(a)
    return PseudoDiffOp(coeffs, depth, trunc)


def half_power(
    L: PseudoDiffOp, d: int, depth: int, cancel: threading.Event | None = None
) -> PseudoDiffOp:
    """L^(d + 1/2) = L^d o L^(1/2), exact down to dx^depth."""
    if d < 0:
        raise ValueError("half_power needs d >= 0")
    Ld = integer_power(L, d, cancel=cancel)
    R = sqrt_lax(L, depth - 2 * d, cancel=cancel)
    return compose(Ld, R, depth=depth, cancel=cancel)


def positive_part(A: PseudoDiffOp) -> PseudoDiffOp:
    """(A)_+: the terms with nonnegative powers of dx."""
    if A.depth is not None and A.depth > 0:
        raise ValueError("positive part needs the operator known down to dx^0")
    return PseudoDiffOp({i: c for i, c in A.coeffs.items() if i >= 0}, None, A.trunc)


def negative_part(A: PseudoDiffOp) -> PseudoDiffOp:
    """(A)_-: the terms with negative powers of dx."""
    return PseudoDiffOp({i: c for i, c in A.coeffs.items() if i < 0}, A.depth, A.trunc)


def op_commutator(
    A: PseudoDiffOp,
    B: PseudoDiffOp,
    depth: int | None = None,
    cancel: threading.Event | None = None,
) -> PseudoDiffOp:
    return compose(A, B, depth, cancel) - compose(B, A, depth, cancel)


def residue(A: PseudoDiffOp) -> DiffPoly:
    """Coefficient of dx^-1."""
    if A.depth is not None and A.depth > -1:
        raise ValueError("residue needs the operator known down to dx^-1")
    return A[-1]
