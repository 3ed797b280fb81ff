"""Closed forms and recursions for quadratic DR integrals with the top Hodge class.

Only integral values are represented; no cohomology class is ever built.
Notation: for ramification data a = (a1, a2, a3), b = (b1, b2, b3) with zero
sums, f_g(a, b) is the integral of lambda_g Theta(a)^g DR_g(b) over M_{g,3},
and the quadratic DR integral (two DR cycles) equals f_g / g!.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from ..exactalg import DiffPoly, Scalar, TruncationContext, jet_code
from ..hierarchy import double_factorial

__all__ = [
    "VANISHES",
    "NotDetermined",
    "determinant",
    "quadratic_dr_integral",
    "theta_normalized",
    "theta_normalized_recursive",
    "theta_dr_psi_integral",
    "theta_dr_boundary_term",
    "proof_consistency_value",
    "theta_power_dr_value",
    "psi_pullback_factor",
    "step1_series",
    "quadratic_table",
    "table_to_csv",
]

VANISHES = "vanishes"


class NotDetermined(ValueError):
    """The requested integral is not fixed by the rules implemented here."""


def determinant(a1: int, a2: int, b1: int, b2: int) -> int:
    return a1 * b2 - a2 * b1


def quadratic_dr_integral(g: int, a1: int, a2: int, b1: int, b2: int) -> Fraction:
    """int over M_{g,3} of lambda_g DR_g(a1, a2, -a1-a2) DR_g(b1, b2, -b1-b2).

    Equal to (a1 b2 - a2 b1)^(2g) / (2^(3g) g! (2g+1)!!).
    """
    if g < 0:
        raise ValueError("genus must be nonnegative")
    det = determinant(a1, a2, b1, b2)
    return Fraction(det ** (2 * g), 2 ** (3 * g) * factorial(g) * double_factorial(2 * g + 1))


def theta_normalized(g: int, a1: int, a2: int, b1: int, b2: int) -> Fraction:
    """Closed form of f_g = g! times the quadratic DR integral."""
    det = determinant(a1, a2, b1, b2)
    return Fraction(det ** (2 * g), 2 ** (3 * g) * double_factorial(2 * g + 1))


def theta_normalized_recursive(g: int, a1: int, a2: int, b1: int, b2: int) -> Fraction:
    """f_g by f_0 = 1 and f_g = det^2 / (8 (2g+1)) f_{g-1}."""
    if g < 0:
        raise ValueError("genus must be nonnegative")
    det2 = determinant(a1, a2, b1, b2) ** 2
    f = Fraction(1)
    for h in range(1, g + 1):
        f = f * Fraction(det2, 8 * (2 * h + 1))
    return f


def _check_triple(vec: Sequence[int], name: str) -> tuple[int, int, int]:
    if len(vec) != 3:
        raise ValueError(f"{name} must have three entries")
    if sum(vec) != 0:
        raise ValueError(f"{name} must sum to zero, got {tuple(vec)}")
    return tuple(int(x) for x in vec)


def theta_dr_psi_integral(g: int, i: int, a: Sequence[int], b: Sequence[int]) -> Fraction:
    """int over M_{g,3} of lambda_g psi_i Theta(a)^(g-1) DR_g(b), i in {1, 2, 3}.

    Value ((2g+1) b_i^2 - 6 b_j b_k) / (24 (2g+1)) * f_{g-1}(a, b) with
    {i, j, k} = {1, 2, 3}; f_{g-1} is taken from its closed form.
    """
    if g < 1:
        raise ValueError("needs g >= 1")
    if i not in (1, 2, 3):
        raise ValueError("marked point index must be 1, 2 or 3")
    a = _check_triple(a, "a")
    b = _check_triple(b, "b")
    j, k = [t for t in (0, 1, 2) if t != i - 1]
    bi, bj, bk = b[i - 1], b[j], b[k]
    prev = theta_normalized(g - 1, a[0], a[1], b[0], b[1])
    return Fraction((2 * g + 1) * bi * bi - 6 * bj * bk, 24 * (2 * g + 1)) * prev


def theta_dr_boundary_term(g: int, a: Sequence[int], b: Sequence[int]) -> Fraction:
    """Separating-boundary part: f_{g-1}(a, b) * sum_i a_i^2 b_i^2 / 24."""
    if g < 1:
        raise ValueError("needs g >= 1")
    a = _check_triple(a, "a")
    b = _check_triple(b, "b")
    prev = theta_normalized(g - 1, a[0], a[1], b[0], b[1])
    return prev * Fraction(sum(x * x * y * y for x, y in zip(a, b)), 24)


def proof_consistency_value(g: int, a: Sequence[int], b: Sequence[int]) -> Fraction:
    """1/2 [sum_i a_i^2 (psi_i term) - boundary term], which must equal f_g."""
    a = _check_triple(a, "a")
    psi = sum(a[i - 1] ** 2 * theta_dr_psi_integral(g, i, a, b) for i in (1, 2, 3))
    return (psi - theta_dr_boundary_term(g, a, b)) / 2


def psi_pullback_factor(g: int, n: int) -> int:
    """Ratio 2g - 2 + n between the psi_1 integral on M_{g,n+1} (extra point with a = b = 0)
    and the integral on M_{g,n}."""
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g, n) = ({g}, {n}) is not stable")
    return 2 * g - 2 + n


def theta_power_dr_value(
    g: int,
    n: int,
    k: int,
    b: Sequence[int],
    a: Sequence[int] | None = None,
):
    """int over M_{g,n} of lambda_g Theta(a)^k DR_g(b).

    Returns a Fraction or ``VANISHES``.  Nonzero cases: n = 3 with k = g
    (value g! times the quadratic DR integral, ``a`` required) and
    g = 1, n = 2, k = 0 (value b_1^2 / 24).
    """
    b = [int(x) for x in b]
    if len(b) != n:
        raise ValueError(f"expected {n} entries in b, got {len(b)}")
    if sum(b) != 0:
        raise ValueError("b must sum to zero")
    if a is not None:
        a = [int(x) for x in a]
        if len(a) != n:
            raise ValueError(f"expected {n} entries in a, got {len(a)}")
        if sum(a) != 0:
            return VANISHES
    if g < 0 or k < 0 or 2 * g - 3 + n <= 0 and not (g == 0 and n == 3):
        raise ValueError(f"(g, n) = ({g}, {n}) is not stable")
    # dimension: 2g + k = 3g - 3 + n
    if k != g + n - 3:
        return VANISHES
    # lambda_g Theta^(g+1) = 0 kills n >= 4
    if n >= 4:
        return VANISHES
    if n == 3:
        if a is None:
            if g == 0:
                return Fraction(1)
            raise NotDetermined("n = 3, k = g needs the Theta ramification vector a")
        return factorial(g) * quadratic_dr_integral(g, a[0], a[1], b[0], b[1])
    if n == 2:
        if g == 1:
            return Fraction(b[0] * b[0], 24)
        return VANISHES
    # n == 1: lambda_g DR_g(0) = (-1)^g lambda_g^2 = 0
    return VANISHES


def step1_series(gmax: int, trunc: TruncationContext | None = None) -> DiffPoly:
    """sum_{g<=gmax} sum_{k1+k2=2g} (-1)^k2 (-eps^2 mu^2)^g / (2^(2g) k1! k2!) u_{k1,k2} u_{k2,k1}."""
    if trunc is None:
        trunc = TruncationContext(max_mu=2 * gmax)
    terms: dict = {}
    for g in range(gmax + 1):
        for k1 in range(2 * g + 1):
            k2 = 2 * g - k1
            c = Fraction((-1) ** k2 * (-1) ** g, 2 ** (2 * g) * factorial(k1) * factorial(k2))
            key = (tuple(sorted((jet_code(k1, k2), jet_code(k2, k1)))), 2 * g, 2 * g)
            terms[key] = terms.get(key, Fraction(0)) + c
    return DiffPoly({k: Scalar(v) for k, v in terms.items()}, trunc)


def quadratic_table(gmax: int, amax: int, bmax: int) -> list[tuple]:
    """Rows (g, a1, a2, b1, b2, value) for g <= gmax, |a_i| <= amax, |b_i| <= bmax."""
    rows = []
    ar = range(-amax, amax + 1)
    br = range(-bmax, bmax + 1)
    for g in range(gmax + 1):
        for a1 in ar:
            for a2 in ar:
                for b1 in br:
                    for b2 in br:
                        rows.append((g, a1, a2, b1, b2, quadratic_dr_integral(g, a1, a2, b1, b2)))
    return rows


def table_to_csv(rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "a1", "a2", "b1", "b2", "value"])
    for g, a1, a2, b1, b2, v in rows:
        w.writerow([g, a1, a2, b1, b2, f"{v.numerator}/{v.denominator}"])
    return buf.getvalue()
