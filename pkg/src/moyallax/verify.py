"""Invariant suites driven by ``moyallax verify`` and the acceptance run.

Every check compares exact objects; a failing check carries the difference
(a polynomial, or a rational for integral checks).
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Callable

from gmpy2 import mpq

from .drgeom import (
    extract_from_flow,
    psi_pullback_factor,
    step1_series,
    theta_normalized,
    theta_power_dr_value,
)
from .exactalg import DiffPoly, Scalar, TruncationContext, bidegree, const, dx, dy, jet_code, u
from .hierarchy import dispersionless_limit, flow_commutator, flow_rhs
from .moyal import star
from .psdo import compose, lax_operator, sqrt_lax

__all__ = [
    "Check",
    "SuiteReport",
    "SUITES",
    "run_suite",
    "random_homogeneous",
    "flow1_expected",
    "dispersionless_expected",
]


@dataclass
class Check:
    name: str
    ok: bool
    discrepancy: Any = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "PASS" if self.ok else "FAIL"}
        if not self.ok and self.discrepancy is not None:
            d = self.discrepancy
            out["discrepancy"] = d.to_json() if hasattr(d, "to_json") else str(d)
        return out


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, lhs, rhs) -> Check:
        ok = lhs == rhs
        diff = None
        if not ok:
            try:
                diff = lhs - rhs
            except TypeError:
                diff = f"{lhs!r} != {rhs!r}"
        chk = Check(name, ok, diff)
        self.checks.append(chk)
        return chk

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "status": "PASS" if self.ok else "FAIL",
            "checks": [c.to_json() for c in self.checks],
        }

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            if c.ok:
                lines.append(f"PASS {c.name}")
            else:
                lines.append(f"FAIL {c.name}: {c.discrepancy}")
        lines.append(f"{'PASS' if self.ok else 'FAIL'} {self.suite} ({len(self.checks)} checks)")
        return "\n".join(lines)


# expected values


def flow1_expected(trunc: TruncationContext) -> DiffPoly:
    """1/2 dx(u*u) + eps^2/12 u_{3,0}."""
    U = u(trunc=trunc)
    half = Scalar(mpq(1, 2))
    return dx(star(U, U)).scale(half) + u(3, 0, trunc).shift(eps=2).scale(Scalar(mpq(1, 12)))


def dispersionless_expected(d: int, trunc: TruncationContext) -> DiffPoly:
    """dx(u^(d+1) / (d+1)!)."""
    return dx(u(trunc=trunc) ** (d + 1)).scale(Scalar(mpq(1, factorial(d + 1))))


# random data


def random_homogeneous(
    rng: random.Random,
    trunc: TruncationContext,
    max_order: int = 3,
    max_jets: int = 1,
    max_mu: int = 1,
    n_terms: int = 2,
) -> DiffPoly:
    """A bihomogeneous polynomial with jets of order <= max_order.

    Monomials are drawn at random and kept if they share the bidegree of the
    first one; eps exponents are free, mu exponents lie in [0, max_mu].
    Triple star products of two-jet monomials at mu cap 6 reach ~10^5 terms,
    hence the single-jet default.
    """
    target = None
    terms: dict = {}
    attempts = 0
    while len(terms) < n_terms and attempts < 200:
        attempts += 1
        jets = []
        for _ in range(rng.randint(1, max_jets)):
            kx = rng.randint(0, max_order)
            ky = rng.randint(0, max_order - kx)
            jets.append((kx, ky))
        sx = sum(j[0] for j in jets)
        sy = sum(j[1] for j in jets)
        if target is None:
            m = rng.randint(0, max_mu)
            e = rng.randint(-1, 2)
            target = (sx - e, sy - m)
        e, m = sx - target[0], sy - target[1]
        if not 0 <= m <= max_mu or not trunc.admits(e, m):
            continue
        key = (tuple(sorted(jet_code(*j) for j in jets)), e, m)
        c = Scalar(mpq(rng.randint(-5, 5), rng.randint(1, 4)), mpq(rng.randint(-2, 2), rng.randint(1, 3)))
        if c:
            terms[key] = c
    return DiffPoly(terms, trunc)


# suites



def suite_sqrt(mu_cap: int = 4, depth: int = -10, cancel=None, **_) -> SuiteReport:
    """R o R - L vanishes down to the depth; deepening by one keeps every coefficient."""
    rep = SuiteReport("sqrt")
    trunc = TruncationContext(max_mu=mu_cap)
    L = lax_operator(trunc)
    for dep in (depth, depth - 1):
        R = sqrt_lax(L, dep, cancel=cancel)
        RR = compose(R, R, cancel=cancel)
        for i in sorted(RR.coeffs.keys() | L.coeffs.keys(), reverse=True):
            if RR.depth is not None and i < RR.depth:
                continue
            rep.add(f"depth {dep}: order {i} of R*R - L", RR[i], L[i])
        if dep == depth:
            first = R
        else:
            for i in range(1, depth - 1, -1):
                rep.add(f"deepening keeps coefficient of D^{i}", R[i], first[i])
    return rep


def suite_assoc(mu_cap: int = 6, seed: int = 0, count: int = 100, **_) -> SuiteReport:
    """Associativity, unit, derivation and grading laws on random triples."""
    rep = SuiteReport("assoc")
    rng = random.Random(seed)
    trunc = TruncationContext(max_mu=mu_cap)
    one = const(1, trunc)
    for t in range(count):
        f, g, h = (random_homogeneous(rng, trunc) for _ in range(3))
        rep.add(f"triple {t}: associativity", star(star(f, g), h), star(f, star(g, h)))
        rep.add(f"triple {t}: left unit", star(one, f), f)
        rep.add(f"triple {t}: right unit", star(f, one), f)
        fg = star(f, g)
        rep.add(f"triple {t}: dx derivation", dx(fg), star(dx(f), g) + star(f, dx(g)))
        rep.add(f"triple {t}: dy derivation", dy(fg), star(dy(f), g) + star(f, dy(g)))
        if fg:
            bf, bg = bidegree(f), bidegree(g)
            rep.add(f"triple {t}: grading", bidegree(fg), (bf[0] + bg[0], bf[1] + bg[1]))
    return rep


def suite_flow1(mu_cap: int = 8, depth: int | None = None, cancel=None, **_) -> SuiteReport:
    rep = SuiteReport("flow1")
    trunc = TruncationContext(max_mu=mu_cap)
    P = flow_rhs(1, trunc, depth, cancel)
    rep.add(f"flow 1 at mu cap {mu_cap}", P, flow1_expected(trunc))
    return rep


def suite_commute(mu_cap: int = 4, d: int | None = None, depth: int | None = None, cancel=None, **_) -> SuiteReport:
    rep = SuiteReport("commute")
    trunc = TruncationContext(max_mu=mu_cap)
    P1 = flow_rhs(1, trunc, depth, cancel)
    for dd in [d] if d else [2, 3]:
        Pd = flow_rhs(dd, trunc, depth, cancel)
        rep.add(f"[P1, P{dd}] at mu cap {mu_cap}", flow_commutator(P1, Pd), DiffPoly({}, trunc))
    return rep


def suite_dispersionless(mu_cap: int = 4, d: int | None = None, depth: int | None = None, cancel=None, **_) -> SuiteReport:
    rep = SuiteReport("dispersionless")
    trunc = TruncationContext(max_mu=mu_cap)
    for dd in [d] if d else [1, 2, 3]:
        P = flow_rhs(dd, trunc, depth, cancel)
        rep.add(f"eps^0 part of flow {dd}", dispersionless_limit(P), dispersionless_expected(dd, trunc))
    return rep


def suite_step1(mu_cap: int = 8, **_) -> SuiteReport:
    rep = SuiteReport("step1")
    trunc = TruncationContext(max_mu=mu_cap)
    U = u(trunc=trunc)
    rep.add(f"step 1 series through g={mu_cap // 2} equals u*u", step1_series(mu_cap // 2, trunc), star(U, U))
    return rep


def suite_extract_d1(gmax: int = 3, cancel=None, **_) -> SuiteReport:
    """Values read off g_1 against the closed forms."""
    rep = SuiteReport("extract-d1")
    for b in range(1, 6):
        got = extract_from_flow(1, 1, 0, [b, -b], cancel=cancel).value
        rep.add(f"g=1 k=0 b=({b},{-b})", got, Fraction(b * b, 12))
        rep.add(
            f"g=1 k=0 b=({b},{-b}) vs pullback factor",
            got,
            psi_pullback_factor(1, 2) * theta_power_dr_value(1, 2, 0, [b, -b]),
        )
    a, b = [1, 0, -1], [0, 1, -1]
    for g in range(gmax + 1):
        got = extract_from_flow(1, g, g, b, a, cancel=cancel).value
        rep.add(f"n=3 k=g={g}: (2g+1) f_g", got, (2 * g + 1) * theta_normalized(g, a[0], a[1], b[0], b[1]))
        rep.add(
            f"n=3 k=g={g}: pullback factor times value",
            got,
            psi_pullback_factor(g, 3) * theta_power_dr_value(g, 3, g, b, a),
        )
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "sqrt": suite_sqrt,
    "assoc": suite_assoc,
    "flow1": suite_flow1,
    "commute": suite_commute,
    "dispersionless": suite_dispersionless,
    "step1": suite_step1,
    "extract-d1": suite_extract_d1,
}


def run_suite(name: str, cancel: threading.Event | None = None, **options) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(cancel=cancel, **options)
