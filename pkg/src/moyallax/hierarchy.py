"""Noncommutative KdV flows, evolutionary vector fields and local functionals."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import prod

from gmpy2 import mpq

from .errors import ConsistencyError, check_cancel
from .exactalg import (
    JET_BASE,
    DiffPoly,
    Scalar,
    TruncationContext,
    bidegree,
    dx,
    dxy,
    jets_present,
    mul,
    partial_u,
    variational_derivative,
)
from .psdo import compose, half_power, lax_operator, positive_part

__all__ = [
    "LocalFunctional",
    "default_depth",
    "flow_operator_commutator",
    "flow_rhs",
    "evolutionary_derivative",
    "flow_commutator",
    "poisson_bracket",
    "hamiltonian_flow",
    "integrate_dx",
    "reconstruct_density",
    "hamiltonian_density",
    "dispersionless_limit",
    "double_factorial",
    "degree_violations",
]


def double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class LocalFunctional:
    """A density taken modulo x- and y-total derivatives and constants.

    Structural equality of two instances compares densities literally; use
    ``moyallax.drgeom.functional_equal`` for equality as functionals.
    """

    density: DiffPoly

    def to_json(self) -> dict:
        return {"density": self.density.to_json()}


def default_depth(d: int) -> int:
    """Shallowest sqrt depth for which (L^(d+1/2))_+ is exact: -2d."""
    return -2 * d


def flow_operator_commutator(
    d: int,
    trunc: TruncationContext,
    depth: int | None = None,
    cancel: threading.Event | None = None,
):
    """[(L^(d+1/2))_+, L] computed with the sqrt taken down to dx^depth.

    The eps exponent is left unbounded internally; only the mu cap of
    ``trunc`` is applied, which is sound because mu exponents never decrease.
    """
    if d < 1:
        raise ValueError("flows are indexed by d >= 1")
    if depth is None:
        depth = default_depth(d)
    if depth > -2 * d:
        raise ValueError(f"depth must be <= {-2 * d} for flow {d}")
    inner = TruncationContext(max_mu=trunc.max_mu)
    L = lax_operator(inner)
    A = half_power(L, d, depth + 2 * d, cancel=cancel)
    P = positive_part(A)
    return compose(P, L, cancel=cancel) - compose(L, P, cancel=cancel)


def flow_rhs(
    d: int,
    trunc: TruncationContext,
    depth: int | None = None,
    cancel: threading.Event | None = None,
) -> DiffPoly:
    """du/dt_d from eps^(2d)/(2d+1)!! [(L^(d+1/2))_+, L] with L = dx^2 + 2 eps^-2 u.

    Raises ConsistencyError if the commutator has a nonzero coefficient at any
    dx-order other than 0, or if the result is not homogeneous of bidegree (1, 0).
    """
    comm = flow_operator_commutator(d, trunc, depth, cancel)
    bad = {i: c for i, c in comm.coeffs.items() if i != 0}
    if bad:
        orders = sorted(bad, reverse=True)
        raise ConsistencyError(
            f"flow {d}: commutator has nonzero coefficients at dx-orders {orders}",
            discrepancy=bad,
        )
    check_cancel(cancel)
    # dL/dt = 2 eps^-2 du/dt
    factor = Scalar(mpq(1, 2 * double_factorial(2 * d + 1)))
    rhs = comm[0].scale(factor).shift(eps=2 * d + 2)
    deg = bidegree(rhs)
    if rhs and deg != (1, 0):
        raise ConsistencyError(f"flow {d} has bidegree {deg}, expected (1, 0)", discrepancy=rhs)
    return rhs.with_trunc(trunc)


def evolutionary_derivative(P: DiffPoly, f: DiffPoly) -> DiffPoly:
    """Derivative of f along du/dt = P: sum over jets of (dx^k1 dy^k2 P) * df/du_{k1,k2}."""
    trunc = P.trunc.intersect(f.trunc)
    out = DiffPoly._make({}, trunc, P.dropped or f.dropped)
    cache: dict = {}
    for kx, ky in jets_present(f):
        key = (kx, ky)
        if key not in cache:
            cache[key] = dxy(P, kx, ky)
        out = out + mul(cache[key], partial_u(f, kx, ky))
    return out


def flow_commutator(P: DiffPoly, Q: DiffPoly) -> DiffPoly:
    """Commutator of the flows du/dt = P and du/ds = Q; zero iff they commute."""
    return evolutionary_derivative(P, Q) - evolutionary_derivative(Q, P)


def poisson_bracket(F: LocalFunctional, G: LocalFunctional) -> LocalFunctional:
    """{F, G} with density (dF/du) * dx(dG/du)."""
    return LocalFunctional(mul(variational_derivative(F.density), dx(variational_derivative(G.density))))


def hamiltonian_flow(G: LocalFunctional) -> DiffPoly:
    return dx(variational_derivative(G.density))


def _lead_order(key):
    # jets compared as descending lists; eps/mu groups never interact under dx
    return (key[1], key[2], key[0][::-1])


def integrate_dx(h: DiffPoly) -> DiffPoly:
    """Antiderivative of h in the image of dx, with zero constant term.

    Greedy reduction: the largest monomial of dx(Q) for a monomial Q comes from
    raising the largest jet of Q, so the leading term of h determines the next
    term of the antiderivative uniquely.
    Raises ValueError if h is not a total x-derivative.
    """
    rest = dict(h._terms)
    out: dict = {}
    while rest:
        key = max(rest, key=_lead_order)
        c = rest[key]
        jets, e, m = key
        if not jets:
            raise ValueError("not a total x-derivative: constant term present")
        top = jets[-1]
        if top < JET_BASE:
            raise ValueError(f"not a total x-derivative: leading term {key} has no x-jet")
        lowered = top - JET_BASE
        q_jets = tuple(sorted(jets[:-1] + (lowered,)))
        if q_jets[-1] != lowered:
            raise ValueError(f"not a total x-derivative at leading term {key}")
        mult = q_jets.count(lowered)
        qc = c * Scalar(mpq(1, mult))
        qkey = (q_jets, e, m)
        out[qkey] = out.get(qkey, Scalar(0)) + qc
        step = dx(DiffPoly._make({qkey: qc}, h.trunc, False))
        for k, v in step._terms.items():
            nv = rest.get(k, Scalar(0)) - v
            if nv:
                rest[k] = nv
            else:
                rest.pop(k, None)
    return DiffPoly._make(out, h.trunc, h.dropped)


def reconstruct_density(h: DiffPoly) -> LocalFunctional:
    """Density whose variational derivative is h, by the homotopy formula.

    density = int_0^1 u * h(s u) ds; a monomial with n jets contributes with
    weight 1/(n+1).  Raises ValueError when h is not a variational gradient.
    """
    terms = {}
    for (jets, e, m), c in h._terms.items():
        if not jets:
            raise ValueError("gradient must have zero constant term")
        terms[(tuple(sorted(jets + (0,))), e, m)] = c * Scalar(mpq(1, len(jets) + 1))
    density = DiffPoly._make(terms, h.trunc, h.dropped)
    back = variational_derivative(density)
    if back != h:
        raise ValueError("input is not a variational gradient (homotopy post-check failed)")
    return LocalFunctional(density)


def hamiltonian_density(flow: DiffPoly) -> LocalFunctional:
    """Local functional G with dx(dG/du) = flow."""
    return reconstruct_density(integrate_dx(flow))


def dispersionless_limit(P: DiffPoly) -> DiffPoly:
    """The eps^0 part of P."""
    if any(e < 0 for _, e, _ in P._terms):
        raise ValueError("dispersionless limit undefined: negative eps exponents present")
    return P.filter(lambda j, e, m: e == 0)


def degree_violations(P: DiffPoly) -> list:
    """Monomials breaking deg_x = i + 1 at eps^i, deg_y = 0 (i.e. bidegree (1, 0))."""
    bad = []
    for key in sorted(P._terms):
        jets, e, m = key
        sx = sum(c // JET_BASE for c in jets)
        sy = sum(c % JET_BASE for c in jets)
        if (sx - e, sy - m) != (1, 0):
            bad.append(key)
    return bad

