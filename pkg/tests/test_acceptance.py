"""Acceptance criteria, one test per criterion.

Every comparison is exact. Each test prints a single ``PASS``/``FAIL`` line;
run ``python3 tests/test_acceptance.py`` for the bare report or
``pytest -s tests/test_acceptance.py`` to see the lines under pytest.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from moyallax.drgeom import (
    extract_from_flow,
    functional_equal,
    functional_is_zero,
    hamiltonian,
    proof_consistency_value,
    psi_pullback_factor,
    quadratic_dr_integral,
    step1_series,
    theta_normalized_recursive,
    theta_power_dr_value,
)
from moyallax.exactalg import JET_BASE, DiffPoly, TruncationContext, u, variational_derivative
from moyallax.hierarchy import (
    LocalFunctional,
    degree_violations,
    dispersionless_limit,
    flow_commutator,
    flow_operator_commutator,
    flow_rhs,
    poisson_bracket,
    reconstruct_density,
)
from moyallax.moyal import star
from moyallax.verify import dispersionless_expected, flow1_expected, suite_assoc, suite_sqrt

T4 = TruncationContext(max_mu=4)


def report(n: int, label: str, ok: bool, started: float, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {label} ({time.perf_counter() - started:.1f} s)"
    if detail and not ok:
        line += f" :: {detail}"
    print(line, flush=True)
    assert ok, line


@pytest.fixture(scope="module")
def flows():
    return {d: flow_rhs(d, T4) for d in (1, 2, 3)}


def test_criterion_01_flow1_identity():
    t0 = time.perf_counter()
    trunc = TruncationContext(max_mu=8)
    P = flow_rhs(1, trunc)
    expected = flow1_expected(trunc)
    report(1, "flow 1 equals 1/2 dx(u*u) + eps^2/12 u_{3,0} at mu cap 8", P == expected, t0, repr(P - expected))


def test_criterion_02_step1_identity():
    t0 = time.perf_counter()
    trunc = TruncationContext(max_mu=8)
    U = u(trunc=trunc)
    lhs, rhs = step1_series(4, trunc), star(U, U)
    report(2, "step-1 series through g=4 equals u*u at mu cap 8", lhs == rhs, t0, repr(lhs - rhs))


def test_criterion_03_quadratic_table():
    t0 = time.perf_counter()
    rng = range(-4, 5)
    bad = []
    for g in range(7):
        for a1, a2, b1, b2 in itertools.product(rng, repeat=4):
            v = quadratic_dr_integral(g, a1, a2, b1, b2)
            if factorial(g) * v != theta_normalized_recursive(g, a1, a2, b1, b2):
                bad.append(("recursion", g, a1, a2, b1, b2))
            if g > 0 and (v == 0) != (a1 * b2 == a2 * b1):
                bad.append(("zero locus", g, a1, a2, b1, b2))
    report(3, "closed form x g! equals recursion, zero iff a1 b2 = a2 b1 (g<=6, |.|<=4)", not bad, t0, str(bad[:5]))


def test_criterion_04_proof_consistency():
    t0 = time.perf_counter()
    rng = range(-3, 4)
    bad = []
    for g in range(1, 6):
        for a1, a2, b1, b2 in itertools.product(rng, repeat=4):
            a, b = (a1, a2, -a1 - a2), (b1, b2, -b1 - b2)
            if proof_consistency_value(g, a, b) != theta_normalized_recursive(g, a1, a2, b1, b2):
                bad.append((g, a, b))
    report(4, "1/2 [sum a_i^2 psi-term - boundary] = f_g (g<=5, |.|<=3)", not bad, t0, str(bad[:5]))


def test_criterion_05_square_root():
    t0 = time.perf_counter()
    rep = suite_sqrt(mu_cap=4, depth=-10)
    failed = [c.name for c in rep.checks if not c.ok]
    report(5, "R*R - L vanishes to depth -10, deepening to -11 keeps coefficients (mu cap 4)", rep.ok, t0, str(failed))


def test_criterion_06_order_zero_residual():
    t0 = time.perf_counter()
    bad = {}
    for d in (1, 2, 3):
        for depth in (-2 * d, -(2 * d + T4.max_mu + 4)):
            comm = flow_operator_commutator(d, T4, depth)
            orders = sorted(i for i in comm.coeffs if i != 0)
            if orders:
                bad[(d, depth)] = orders
    report(6, "[(L^(d+1/2))_+, L] has only dx-order 0 for d=1,2,3 (mu cap 4)", not bad, t0, str(bad))


def test_criterion_07_dispersionless(flows):
    t0 = time.perf_counter()
    bad = [d for d, P in flows.items() if dispersionless_limit(P) != dispersionless_expected(d, T4)]
    report(7, "eps^0 part of flow d equals dx(u^(d+1)/(d+1)!) for d=1,2,3", not bad, t0, str(bad))


def test_criterion_08_degrees_and_reality(flows):
    t0 = time.perf_counter()
    bad = []
    for d, P in flows.items():
        bad += [(d, k) for k in degree_violations(P)]
        for (jets, e, m), c in P.terms.items():
            sx = sum(code // JET_BASE for code in jets)
            sy = sum(code % JET_BASE for code in jets)
            # deg_x eps = deg_y mu = -1
            if sx - e != 1 or sy - m != 0 or not c.is_real:
                bad.append((d, jets, e, m))
    report(8, "deg_x P_{d,i} = i+1, deg_y P_{d,i} = 0, real coefficients for d<=3", not bad, t0, str(bad[:5]))


def test_criterion_09_commutation(flows):
    t0 = time.perf_counter()
    comms = {d: flow_commutator(flows[1], flows[d]) for d in (2, 3)}
    bad = {d: repr(c) for d, c in comms.items() if c}
    report(9, "[P1, Pd] = 0 for d=2,3 at mu cap 4", not bad, t0, str(bad))


def test_criterion_10_moyal_algebra():
    t0 = time.perf_counter()
    rep = suite_assoc(mu_cap=6, seed=0, count=100)
    failed = [c.name for c in rep.checks if not c.ok]
    report(10, "associativity, unit, derivation, grading on 100 random triples (mu cap 6)", rep.ok, t0, str(failed[:5]))


def test_criterion_11_extraction():
    t0 = time.perf_counter()
    bad = []
    for b in range(1, 6):
        got = extract_from_flow(1, 1, 0, [b, -b]).value
        if got != Fraction(b * b, 12):
            bad.append(("two points", b, got))
    a, bb = [1, 0, -1], [0, 1, -1]
    for g in range(4):
        got = extract_from_flow(1, g, g, bb, a).value
        closed = (2 * g + 1) * factorial(g) * quadratic_dr_integral(g, a[0], a[1], bb[0], bb[1])
        oracle = psi_pullback_factor(g, 3) * theta_power_dr_value(g, 3, g, bb, a)
        if not got == closed == oracle:
            bad.append(("three points", g, got, closed, oracle))
    report(11, "extract b^2/12 for b=1..5 and (2g+1) g! f_g at n=3 for g<=3", not bad, t0, str(bad))


def _random_density(rng: random.Random) -> DiffPoly:
    terms = {}
    for _ in range(3):
        jets = tuple(sorted(rng.randint(0, 2) * JET_BASE + rng.randint(0, 2) for _ in range(rng.randint(2, 4))))
        terms[(jets, rng.randint(0, 2), rng.randint(0, 2))] = rng.randint(-4, 4)
    return DiffPoly(terms)


def test_criterion_12_functional_calculus():
    t0 = time.perf_counter()
    rng = random.Random(12)
    bad = []
    done = 0
    while done < 50:
        h = variational_derivative(_random_density(rng))
        if not h:
            continue
        done += 1
        if variational_derivative(reconstruct_density(h).density) != h:
            bad.append(repr(h))
    G1, G2 = hamiltonian(1, T4), hamiltonian(2, T4)
    bracket = poisson_bracket(G1, G2)
    zero = LocalFunctional(DiffPoly({}, T4))
    commuting = functional_equal(bracket, zero, support_bound=4)
    # a non-commuting control keeps the check honest
    control = poisson_bracket(LocalFunctional(u() ** 3), LocalFunctional(u(1, 0) * u(0, 1) * u()))
    detected = not functional_is_zero(control.density, support_bound=4)
    ok = not bad and commuting and detected
    report(12, "delta/delta u of reconstructed densities on 50 gradients; {g1, g2} = 0 (support bound 4)", ok, t0,
           f"bad={bad[:2]} commuting={commuting} control_detected={detected}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
