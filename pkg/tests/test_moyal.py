from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moyallax.drgeom import functional_is_zero
from moyallax.exactalg import DiffPoly, Scalar, TruncationContext, bidegree, const, dx, dy, eps_power, mu_power, u
from moyallax.exactalg.scalar import I
from moyallax.moyal import moyal_order_bound, star, star_commutator, star_power
from moyallax.verify import random_homogeneous

T4 = TruncationContext(max_mu=4)
T2 = TruncationContext(max_mu=2)


def U(kx=0, ky=0, trunc=T4):
    return u(kx, ky, trunc)


def test_unit():
    f = U(2, 1) * U() + eps_power(1, T4) * U(0, 3)
    assert star(const(1, T4), f) == f
    assert star(f, const(1, T4)) == f


def test_star_u_u_first_correction():
    # g = 1 term: -eps^2 mu^2 (u_{2,0} u_{0,2} - u_{1,1}^2) / 4
    got = star(U(trunc=T2), U(trunc=T2))
    eps2mu2 = (eps_power(2, T2) * mu_power(2, T2)).scale(Scalar(Fraction(-1, 4)))
    expected = U(trunc=T2) ** 2 + eps2mu2 * (U(2, 0, T2) * U(0, 2, T2) - U(1, 1, T2) ** 2)
    assert got == expected


def test_star_commutator_u_ux_leading_term():
    got = star_commutator(U(trunc=T2), U(1, 0, T2))
    lead = (eps_power(1, T2) * mu_power(1, T2)).scale(I)
    assert got == lead * (U(1, 0, T2) * U(1, 1, T2) - U(0, 1, T2) * U(2, 0, T2))


def test_commutator_trivial_cases():
    f = U(1, 2) * U()
    assert not star_commutator(f, f)
    assert not star_commutator(const(7, T4), f)


def test_commutator_has_only_odd_orders():
    f, g = U(2, 0) * U(), U(0, 1)
    c = star_commutator(f, g)
    assert c
    assert all(m % 2 == 1 for _, _, m in c.terms)


def test_star_power():
    assert star_power(U(), 1) == U()
    assert star_power(U(), 2) == star(U(), U())
    assert star_power(U(), 3).mu_zero() == (U() ** 3).mu_zero()
    assert star_power(U(), 0) == const(1, T4)
    with pytest.raises(ValueError):
        star_power(U(), -1)


def test_needs_mu_cap_for_nonconstant_inputs():
    with pytest.raises(ValueError):
        star(u(), u())
    assert star(u(), const(3)) == u() * 3
    assert moyal_order_bound(u(), u(), 4) == 4


def test_mu_cap_marks_truncation():
    assert star(U(), U()).dropped
    assert not star(const(2, T4), U()).dropped


def test_mu_zero_limit_is_commutative_product():
    f, g = U(1, 1) * U(), U(0, 2) + U(3, 0)
    assert star(f, g).mu_zero() == (f * g).mu_zero()


@given(st.integers(0, 10_000))
def test_associativity_random(seed):
    import random

    rng = random.Random(seed)
    t = TruncationContext(max_mu=4)
    f, g, h = (random_homogeneous(rng, t, max_order=2) for _ in range(3))
    assert star(star(f, g), h) == star(f, star(g, h))


@given(st.integers(0, 10_000))
def test_derivation_and_grading_random(seed):
    import random

    rng = random.Random(seed)
    f, g = (random_homogeneous(rng, T4) for _ in range(2))
    fg = star(f, g)
    assert dx(fg) == star(dx(f), g) + star(f, dx(g))
    assert dy(fg) == star(dy(f), g) + star(f, dy(g))
    if fg:
        (a, b), (c, d) = bidegree(f), bidegree(g)
        assert bidegree(fg) == (a + c, b + d)


def test_trace_property():
    # the integral of a star commutator vanishes
    f = U(1, 0) * U() + U(0, 2)
    g = U(2, 1) + U() * U(0, 1)
    assert functional_is_zero(star_commutator(f, g))
    assert functional_is_zero(star_commutator(f, g), support_bound=2)
