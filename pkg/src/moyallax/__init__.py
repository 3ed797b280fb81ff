"""Exact symbolic engine for the Moyal (noncommutative) KdV hierarchy and
quadratic double ramification integrals."""

from .errors import Cancelled, ConsistencyError

__version__ = "0.1.0"

__all__ = ["Cancelled", "ConsistencyError", "__version__"]
