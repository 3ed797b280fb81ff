"""Exact scalars and the commutative differential-polynomial algebra."""

from .diffpoly import (
    INHOMOGENEOUS,
    JET_BASE,
    UNBOUNDED,
    DiffMonomial,
    DiffPoly,
    TruncationContext,
    add,
    bidegree,
    binomial_general,
    const,
    dx,
    dxy,
    dy,
    eps_power,
    jet_code,
    jet_decode,
    jets_present,
    mu_power,
    mul,
    partial_u,
    scale_u,
    u,
    variational_derivative,
)
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "INHOMOGENEOUS",
    "JET_BASE",
    "UNBOUNDED",
    "DiffMonomial",
    "DiffPoly",
    "TruncationContext",
    "Scalar",
    "I",
    "ONE",
    "ZERO",
    "add",
    "bidegree",
    "binomial_general",
    "const",
    "dx",
    "dxy",
    "dy",
    "eps_power",
    "jet_code",
    "jet_decode",
    "jets_present",
    "mu_power",
    "mul",
    "partial_u",
    "scale_u",
    "u",
    "variational_derivative",
]
