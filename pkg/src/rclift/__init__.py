"""Solver and verification harness for relaxed commutant lifting and the
relaxed Nehari extension problem, via linear fractional state-space
coefficient functions over a free Schur-class parameter."""

from . import generators, hardy, lifting, linalg, nehari, redheffer, schur, serialize
from .errors import RcliftError

__all__ = [
    "RcliftError",
    "generators",
    "hardy",
    "lifting",
    "linalg",
    "nehari",
    "redheffer",
    "schur",
    "serialize",
]

__version__ = "0.1.0"
