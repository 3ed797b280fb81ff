"""Reading intersection numbers off Hamiltonian densities.

The DR Hamiltonian g_d has density
    sum (-eps^2)^g / n! * mu^(2k) / k! * int lambda_g psi_1^d Theta(0, a)^k DR_g(0, b) * prod p^{a_j}_{b_j}
summed over ordered label tuples, so the coefficient of a fixed monomial
prod p^{a_j}_{b_j} collects n! / |Aut| equal terms.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from ..errors import ConsistencyError
from ..exactalg import TruncationContext
from ..hierarchy import LocalFunctional, flow_rhs, hamiltonian_density
from .fourier import automorphism_count, constant_coefficient

__all__ = ["Extraction", "extract_intersection_numbers", "hamiltonian", "extract_from_flow"]


@dataclass(frozen=True)
class Extraction:
    value: Fraction
    d: int
    g: int
    k: int
    a: tuple
    b: tuple

    @property
    def provenance(self) -> str:
        """'paper' for d = 1 (independently determined), 'prediction' otherwise."""
        return "paper" if self.d == 1 else "prediction"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "g": self.g,
            "k": self.k,
            "a": list(self.a),
            "b": list(self.b),
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "provenance": self.provenance,
        }


def extract_intersection_numbers(
    G: LocalFunctional,
    d: int,
    g: int,
    k: int,
    b: Sequence[int],
    a: Sequence[int] | None = None,
) -> Fraction:
    """int over DR_g(0, b_1..b_n) of lambda_g psi_1^d Theta(0, a)^k, read from G.

    Computed as (-1)^g k! |Aut| times the coefficient of
    eps^(2g) mu^(2k) prod p^{a_j}_{b_j} in the frequency-(0,0) expansion of
    G.density.  ``a`` defaults to all zeros.  ``d`` only labels the
    Hamiltonian; G must be the one for that d.
    """
    b = [int(x) for x in b]
    a = [0] * len(b) if a is None else [int(x) for x in a]
    if len(a) != len(b):
        raise ValueError("a and b must have the same length")
    if sum(b) != 0 or sum(a) != 0:
        raise ValueError("a and b must each sum to zero")
    if d < 0 or g < 0 or k < 0:
        raise ValueError("d, g, k must be nonnegative")
    pairs = list(zip(a, b))
    c = constant_coefficient(G.density, pairs, 2 * g, 2 * k)
    if c.im:
        raise ConsistencyError(f"extracted coefficient {c} is not real", discrepancy=c)
    sign = -1 if g % 2 else 1
    return sign * factorial(k) * automorphism_count(pairs) * c.to_fraction()


def hamiltonian(
    d: int,
    trunc: TruncationContext,
    depth: int | None = None,
    cancel: threading.Event | None = None,
) -> LocalFunctional:
    """The Hamiltonian g_d reconstructed from the Lax-side flow d."""
    return hamiltonian_density(flow_rhs(d, trunc, depth, cancel))


def extract_from_flow(
    d: int,
    g: int,
    k: int,
    b: Sequence[int],
    a: Sequence[int] | None = None,
    depth: int | None = None,
    cancel: threading.Event | None = None,
) -> Extraction:
    """Build g_d with the mu cap the requested coefficient needs, then extract."""
    trunc = TruncationContext(max_mu=2 * k)
    G = hamiltonian(d, trunc, depth, cancel)
    value = extract_intersection_numbers(G, d, g, k, b, a)
    a = [0] * len(b) if a is None else list(a)
    return Extraction(value, d, g, k, tuple(a), tuple(b))
