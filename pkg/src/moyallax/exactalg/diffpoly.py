"""Sparse differential polynomials in the jet variables u_{kx,ky}, eps and mu.

A monomial is stored as a plain tuple ``(jets, eps, mu)`` where ``jets`` is a
sorted tuple of integer jet codes.  The code of u_{kx,ky} is
``kx * JET_BASE + ky`` so that integer order coincides with lexicographic
order on ``(kx, ky)``.  Tuple comparison of the whole key then gives the
canonical monomial order: sorted jet list first, then eps, then mu.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, NamedTuple

from gmpy2 import mpq

from .scalar import ONE, ZERO, Scalar

__all__ = [
    "JET_BASE",
    "INHOMOGENEOUS",
    "TruncationContext",
    "UNBOUNDED",
    "DiffMonomial",
    "DiffPoly",
    "jet_code",
    "jet_decode",
    "u",
    "const",
    "eps_power",
    "mu_power",
    "add",
    "mul",
    "dx",
    "dy",
    "bidegree",
    "partial_u",
    "variational_derivative",
    "scale_u",
]

JET_BASE = 1 << 10

INHOMOGENEOUS = "inhomogeneous"


def jet_code(kx: int, ky: int) -> int:
    if kx < 0 or ky < 0 or ky >= JET_BASE:
        raise ValueError(f"invalid jet u_{{{kx},{ky}}}")
    return kx * JET_BASE + ky


def jet_decode(code: int) -> tuple[int, int]:
    return divmod(code, JET_BASE)


@dataclass(frozen=True)
class TruncationContext:
    """Window of retained monomials.

    ``max_mu`` caps the mu exponent; ``min_eps``/``max_eps`` bound the eps
    exponent.  ``None`` means unbounded on that side.
    """

    max_mu: int | None = None
    min_eps: int | None = None
    max_eps: int | None = None

    def __post_init__(self):
        if self.max_mu is not None and self.max_mu < 0:
            raise ValueError("max_mu must be nonnegative")
        if self.min_eps is not None and self.max_eps is not None and self.min_eps > self.max_eps:
            raise ValueError("min_eps must not exceed max_eps")

    def admits(self, eps: int, mu: int) -> bool:
        if self.max_mu is not None and mu > self.max_mu:
            return False
        if self.min_eps is not None and eps < self.min_eps:
            return False
        if self.max_eps is not None and eps > self.max_eps:
            return False
        return True

    def intersect(self, other: "TruncationContext") -> "TruncationContext":
        if self == other:
            return self
        return TruncationContext(
            max_mu=_min_opt(self.max_mu, other.max_mu),
            min_eps=_max_opt(self.min_eps, other.min_eps),
            max_eps=_min_opt(self.max_eps, other.max_eps),
        )

    @property
    def is_unbounded(self) -> bool:
        return self.max_mu is None and self.min_eps is None and self.max_eps is None

    def to_json(self) -> dict:
        return {"max_mu": self.max_mu, "min_eps": self.min_eps, "max_eps": self.max_eps}

    @classmethod
    def from_json(cls, obj: dict) -> "TruncationContext":
        return cls(obj.get("max_mu"), obj.get("min_eps"), obj.get("max_eps"))


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _max_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


UNBOUNDED = TruncationContext()


class DiffMonomial(NamedTuple):
    """Readable view of a monomial: jets as ``((kx, ky), ...)`` with repetition."""

    jets: tuple[tuple[int, int], ...]
    eps: int
    mu: int

    @property
    def bidegree(self) -> tuple[int, int]:
        return (
            sum(j[0] for j in self.jets) - self.eps,
            sum(j[1] for j in self.jets) - self.mu,
        )

    def key(self) -> tuple:
        return (tuple(sorted(jet_code(*j) for j in self.jets)), self.eps, self.mu)

    @classmethod
    def from_key(cls, key: tuple) -> "DiffMonomial":
        jets, e, m = key
        return cls(tuple(jet_decode(c) for c in jets), e, m)


class DiffPoly:
    """Finite sum of monomials with Gaussian-rational coefficients.

    Values are immutable.  ``dropped`` records whether any monomial was
    discarded by the truncation window while producing this value (or any of
    its inputs), so "equal up to truncation" stays a checkable statement.
    """

    __slots__ = ("_terms", "trunc", "dropped", "_hash")

    def __init__(
        self,
        terms: dict | Iterable | None = None,
        trunc: TruncationContext = UNBOUNDED,
        dropped: bool = False,
    ):
        clean: dict = {}
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        for key, c in items:
            if isinstance(key, DiffMonomial):
                key = key.key()
            else:
                jets, e, m = key
                key = (tuple(sorted(jets)), int(e), int(m))
            if key[2] < 0:
                raise ValueError("mu exponent must be nonnegative")
            c = Scalar.coerce(c)
            if key in clean:
                c = clean[key] + c
            clean[key] = c
        kept = {}
        for key, c in clean.items():
            if not c:
                continue
            if trunc.admits(key[1], key[2]):
                kept[key] = c
            else:
                dropped = True
        self._init(kept, trunc, dropped)

    def _init(self, terms, trunc, dropped):
        self._terms = terms
        self.trunc = trunc
        self.dropped = dropped
        self._hash = None

    @classmethod
    def _make(cls, terms: dict, trunc: TruncationContext, dropped: bool) -> "DiffPoly":
        """Build from an already-canonical term map; zero coefficients are removed."""
        p = object.__new__(cls)
        p._init({k: c for k, c in terms.items() if c}, trunc, dropped)
        return p

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_items(self) -> list:
        return sorted(self._terms.items(), key=lambda kv: kv[0])

    def monomials(self) -> Iterator[tuple[DiffMonomial, Scalar]]:
        for key, c in self.sorted_items():
            yield DiffMonomial.from_key(key), c

    def coefficient(self, mono) -> Scalar:
        if isinstance(mono, DiffMonomial):
            mono = mono.key()
        return self._terms.get(mono, ZERO)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self._terms.values())

    def min_mu(self) -> int:
        return min((k[2] for k in self._terms), default=0)

    def max_jet_count(self) -> int:
        return max((len(k[0]) for k in self._terms), default=0)

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Scalar)) or hasattr(other, "denominator"):
            return self._terms == const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            return other
        return const(other, self.trunc)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._make({k: -c for k, c in self._terms.items()}, self.trunc, self.dropped)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, DiffPoly):
            return mul(self, other)
        try:
            s = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        s = Scalar.coerce(other)
        return self.scale(ONE / s)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = const(1, self.trunc)
        for _ in range(n):
            out = mul(out, self)
        return out

    def scale(self, s: Scalar) -> "DiffPoly":
        if not s:
            return DiffPoly._make({}, self.trunc, self.dropped)
        return DiffPoly._make({k: c * s for k, c in self._terms.items()}, self.trunc, self.dropped)

    def shift(self, eps: int = 0, mu: int = 0) -> "DiffPoly":
        """Multiply by eps**eps * mu**mu, re-applying the window."""
        return DiffPoly._make_filtered(
            {(j, e + eps, m + mu): c for (j, e, m), c in self._terms.items()},
            self.trunc,
            self.dropped,
        )

    @classmethod
    def _make_filtered(cls, terms: dict, trunc: TruncationContext, dropped: bool) -> "DiffPoly":
        kept = {}
        for k, c in terms.items():
            if not c:
                continue
            if trunc.admits(k[1], k[2]):
                kept[k] = c
            else:
                dropped = True
        p = object.__new__(cls)
        p._init(kept, trunc, dropped)
        return p

    def with_trunc(self, trunc: TruncationContext) -> "DiffPoly":
        """Re-express under ``trunc`` (intersected with the current window)."""
        t = self.trunc.intersect(trunc)
        return DiffPoly._make_filtered(self._terms, t, self.dropped)

    def filter(self, predicate) -> "DiffPoly":
        """Keep the terms whose key satisfies ``predicate(jets, eps, mu)``."""
        return DiffPoly._make(
            {k: c for k, c in self._terms.items() if predicate(*k)}, self.trunc, self.dropped
        )

    def real_part(self) -> "DiffPoly":
        return DiffPoly._make(
            {k: Scalar._raw(c.re, mpq(0)) for k, c in self._terms.items()}, self.trunc, self.dropped
        )

    def imag_part(self) -> "DiffPoly":
        return DiffPoly._make(
            {k: Scalar._raw(c.im, mpq(0)) for k, c in self._terms.items()}, self.trunc, self.dropped
        )

    def eps_part(self, e: int) -> "DiffPoly":
        """Coefficient of eps**e, as a polynomial with eps exponent 0."""
        return DiffPoly._make(
            {(j, 0, m): c for (j, ee, m), c in self._terms.items() if ee == e},
            self.trunc,
            self.dropped,
        )

    def mu_zero(self) -> "DiffPoly":
        return self.filter(lambda j, e, m: m == 0)

    # -- derivations ----------------------------------------------------------

    def dx(self) -> "DiffPoly":
        return dx(self)

    def dy(self) -> "DiffPoly":
        return dy(self)

    def bidegree(self):
        return bidegree(self)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> list:
        out = []
        for (jets, e, m), c in self.sorted_items():
            grouped: list[list[int]] = []
            for code in jets:
                kx, ky = jet_decode(code)
                if grouped and grouped[-1][0] == kx and grouped[-1][1] == ky:
                    grouped[-1][2] += 1
                else:
                    grouped.append([kx, ky, 1])
            out.append({"c": c.to_json(), "eps": e, "mu": m, "jets": grouped})
        return out

    @classmethod
    def from_json(cls, data: list, trunc: TruncationContext = UNBOUNDED) -> "DiffPoly":
        terms = {}
        for entry in data:
            jets = []
            for kx, ky, mult in entry["jets"]:
                jets.extend([jet_code(kx, ky)] * mult)
            key = (tuple(sorted(jets)), int(entry["eps"]), int(entry["mu"]))
            terms[key] = terms.get(key, ZERO) + Scalar.from_json(entry["c"])
        return cls(terms, trunc)

    def __repr__(self):
        return f"DiffPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (jets, e, m), c in self.sorted_items():
            factors = []
            if e:
                factors.append("eps" if e == 1 else f"eps^{e}")
            if m:
                factors.append("mu" if m == 1 else f"mu^{m}")
            i = 0
            while i < len(jets):
                j = i
                while j < len(jets) and jets[j] == jets[i]:
                    j += 1
                kx, ky = jet_decode(jets[i])
                name = "u" if (kx, ky) == (0, 0) else f"u_{{{kx},{ky}}}"
                factors.append(name if j - i == 1 else f"{name}^{j - i}")
                i = j
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)


# -- constructors ----------------------------------------------------------


def u(kx: int = 0, ky: int = 0, trunc: TruncationContext = UNBOUNDED) -> DiffPoly:
    """The jet variable u_{kx,ky}."""
    return DiffPoly({((jet_code(kx, ky),), 0, 0): ONE}, trunc)


def const(c, trunc: TruncationContext = UNBOUNDED) -> DiffPoly:
    return DiffPoly({((), 0, 0): Scalar.coerce(c)}, trunc)


def eps_power(n: int, trunc: TruncationContext = UNBOUNDED) -> DiffPoly:
    return DiffPoly({((), n, 0): ONE}, trunc)


def mu_power(n: int, trunc: TruncationContext = UNBOUNDED) -> DiffPoly:
    return DiffPoly({((), 0, n): ONE}, trunc)


# -- operations ------------------------------------------------------------


def add(f: DiffPoly, g: DiffPoly) -> DiffPoly:
    trunc = f.trunc.intersect(g.trunc)
    terms = dict(f._terms)
    for k, c in g._terms.items():
        prev = terms.get(k)
        terms[k] = c if prev is None else prev + c
    if trunc is f.trunc and trunc is g.trunc:
        return DiffPoly._make(terms, trunc, f.dropped or g.dropped)
    return DiffPoly._make_filtered(terms, trunc, f.dropped or g.dropped)


def mul(f: DiffPoly, g: DiffPoly) -> DiffPoly:
    """Commutative product of the underlying polynomial ring."""
    trunc = f.trunc.intersect(g.trunc)
    out: dict = {}
    dropped = f.dropped or g.dropped
    admits = trunc.admits
    for (j1, e1, m1), c1 in f._terms.items():
        for (j2, e2, m2), c2 in g._terms.items():
            e, m = e1 + e2, m1 + m2
            if not admits(e, m):
                dropped = True
                continue
            key = (tuple(sorted(j1 + j2)) if j1 and j2 else (j1 or j2), e, m)
            c = c1 * c2
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
    return DiffPoly._make(out, trunc, dropped)


@lru_cache(maxsize=1 << 18)
def _derive_jets(jets: tuple, step: int) -> tuple:
    """Leibniz rule on a jet multiset: returns ((new_jets, multiplicity), ...)."""
    out = []
    prev = None
    n = len(jets)
    for i, code in enumerate(jets):
        if code == prev:
            continue
        prev = code
        mult = 1
        while i + mult < n and jets[i + mult] == code:
            mult += 1
        new = list(jets)
        new[i] = code + step
        out.append((tuple(sorted(new)), mult))
    return tuple(out)


def _derive(f: DiffPoly, step: int) -> DiffPoly:
    out: dict = {}
    for (jets, e, m), c in f._terms.items():
        for new, mult in _derive_jets(jets, step):
            key = (new, e, m)
            term = c * mult if mult != 1 else c
            prev = out.get(key)
            out[key] = term if prev is None else prev + term
    return DiffPoly._make(out, f.trunc, f.dropped)


def dx(f: DiffPoly) -> DiffPoly:
    """Total x-derivative: u_{k1,k2} -> u_{k1+1,k2}; eps and mu are constants."""
    return _derive(f, JET_BASE)


def dy(f: DiffPoly) -> DiffPoly:
    """Total y-derivative: u_{k1,k2} -> u_{k1,k2+1}."""
    return _derive(f, 1)


def dxy(f: DiffPoly, a: int, b: int) -> DiffPoly:
    for _ in range(a):
        f = dx(f)
    for _ in range(b):
        f = dy(f)
    return f


def bidegree(f: DiffPoly):
    """Common bidegree of all monomials, or ``INHOMOGENEOUS``.

    deg u_{k1,k2} = (k1, k2), deg eps = (-1, 0), deg mu = (0, -1).  The zero
    polynomial is reported as inhomogeneous since it has no well-defined degree.
    """
    degs = set()
    for jets, e, m in f._terms:
        sx = sy = 0
        for code in jets:
            kx, ky = divmod(code, JET_BASE)
            sx += kx
            sy += ky
        degs.add((sx - e, sy - m))
        if len(degs) > 1:
            return INHOMOGENEOUS
    if len(degs) != 1:
        return INHOMOGENEOUS
    return degs.pop()


def partial_u(f: DiffPoly, kx: int, ky: int) -> DiffPoly:
    """Partial derivative with respect to the variable u_{kx,ky}."""
    code = jet_code(kx, ky)
    out: dict = {}
    for (jets, e, m), c in f._terms.items():
        mult = jets.count(code)
        if not mult:
            continue
        i = jets.index(code)
        key = (jets[:i] + jets[i + 1 :], e, m)
        term = c * mult
        prev = out.get(key)
        out[key] = term if prev is None else prev + term
    return DiffPoly._make(out, f.trunc, f.dropped)


def jets_present(f: DiffPoly) -> list[tuple[int, int]]:
    codes = {code for jets, _, _ in f._terms for code in jets}
    return [jet_decode(c) for c in sorted(codes)]


def variational_derivative(f: DiffPoly) -> DiffPoly:
    """Euler operator: sum over jets of (-dx)^k1 (-dy)^k2 applied to df/du_{k1,k2}."""
    out = DiffPoly._make({}, f.trunc, f.dropped)
    for kx, ky in jets_present(f):
        term = partial_u(f, kx, ky)
        term = dxy(term, kx, ky)
        if (kx + ky) % 2:
            term = -term
        out = add(out, term)
    return out


def scale_u(f: DiffPoly) -> dict[int, DiffPoly]:
    """Replace every jet variable by s * jet; returns {power of s: coefficient}."""
    groups: dict[int, dict] = {}
    for key, c in f._terms.items():
        groups.setdefault(len(key[0]), {})[key] = c
    return {n: DiffPoly._make(t, f.trunc, f.dropped) for n, t in sorted(groups.items())}


def binomial_general(i: int, k: int):
    """Generalized binomial i(i-1)...(i-k+1)/k! for any integer i, k >= 0."""
    num = 1
    for t in range(k):
        num *= i - t
    return mpq(num, factorial(k))
