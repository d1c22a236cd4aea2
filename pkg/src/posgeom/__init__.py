"""Exact canonical forms and adjoints of polytopes and plane polypols."""

from .algebra import FactoredRatFn, MPoly, Rat, RatMatrix
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["MPoly", "FactoredRatFn", "Rat", "RatMatrix", "BACKEND"]
