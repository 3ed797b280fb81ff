"""Moyal star product on differential polynomials.

    f * g = sum_n sum_{k1+k2=n} (-1)^k2 (i eps mu)^n / (2^n k1! k2!)
                (dx^k1 dy^k2 f) (dx^k2 dy^k1 g)

Every order n carries exactly mu^n, so the series is cut by the mu cap of the
truncation window and is exact through that order.
"""

from __future__ import annotations

from math import factorial

from gmpy2 import mpq

from .exactalg import DiffPoly, Scalar, const, dx, dy
from .exactalg.scalar import I

__all__ = ["star", "star_commutator", "star_power", "moyal_order_bound"]


class _Derivatives:
    """Lazy table of dx^a dy^b f."""

    def __init__(self, f: DiffPoly):
        self._table = {(0, 0): f}

    def __call__(self, a: int, b: int) -> DiffPoly:
        key = (a, b)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        if b > 0:
            val = dy(self(a, b - 1))
        else:
            val = dx(self(a - 1, 0))
        self._table[key] = val
        return val


def _is_jet_free(f: DiffPoly) -> bool:
    return all(not key[0] for key in f._terms)


def moyal_order_bound(f: DiffPoly, g: DiffPoly, max_mu: int | None) -> int:
    """Largest Moyal order n that can survive the mu cap."""
    if _is_jet_free(f) or _is_jet_free(g):
        return 0
    if max_mu is None:
        raise ValueError("star product of non-constant polynomials needs a mu cap")
    return max(-1, max_mu - f.min_mu() - g.min_mu())


def _coefficient(n: int, k1: int) -> Scalar:
    k2 = n - k1
    sign = -1 if k2 % 2 else 1
    return (I**n) * Scalar(mpq(sign, (1 << n) * factorial(k1) * factorial(k2)))


def star(f: DiffPoly, g: DiffPoly) -> DiffPoly:
    """Moyal product of two differential polynomials under the intersected window."""
    trunc = f.trunc.intersect(g.trunc)
    dropped = f.dropped or g.dropped
    if not f or not g:
        return DiffPoly._make({}, trunc, dropped)
    nmax = moyal_order_bound(f, g, trunc.max_mu)
    if nmax < 0:
        return DiffPoly._make({}, trunc, True)
    cap = trunc.max_mu
    if not (_is_jet_free(f) or _is_jet_free(g)):
        dropped = True  # the series continues past the mu cap
    admits = trunc.admits
    df, dg = _Derivatives(f), _Derivatives(g)
    out: dict = {}
    for n in range(nmax + 1):
        for k1 in range(n + 1):
            k2 = n - k1
            fa = df(k1, k2)
            gb = dg(k2, k1)
            if not fa or not gb:
                continue
            coef = _coefficient(n, k1)
            gitems = sorted(gb._terms.items(), key=lambda kv: kv[0][2])
            for (j1, e1, m1), c1 in fa._terms.items():
                c1 = c1 * coef
                base_mu = m1 + n
                for (j2, e2, m2), c2 in gitems:
                    m = base_mu + m2
                    if cap is not None and m > cap:
                        dropped = True
                        break
                    e = e1 + e2 + n
                    if not admits(e, m):
                        dropped = True
                        continue
                    key = (tuple(sorted(j1 + j2)) if j1 and j2 else (j1 or j2), e, m)
                    c = c1 * c2
                    prev = out.get(key)
                    out[key] = c if prev is None else prev + c
    return DiffPoly._make(out, trunc, dropped)


def star_commutator(f: DiffPoly, g: DiffPoly) -> DiffPoly:
    """[f, g]_* = f*g - g*f (only odd Moyal orders survive)."""
    return star(f, g) - star(g, f)


def star_power(f: DiffPoly, n: int) -> DiffPoly:
    """Left-associated n-fold star product; n = 0 gives 1."""
    if n < 0:
        raise ValueError("star_power needs a nonnegative exponent")
    out = const(1, f.trunc)
    for _ in range(n):
        out = star(out, f)
    return out
