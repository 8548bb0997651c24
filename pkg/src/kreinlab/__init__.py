"""Spectral measures, de Branges kernels and extremality certificates."""

from . import bessel, debranges, jacobi, measures, sturm
from ._errors import (
    BracketCountError,
    DomainError,
    KreinLabError,
    PrecisionOverflowError,
    QuadratureError,
    ResolutionError,
    StiffnessError,
)
from ._expressions import Profile
from .bessel import BesselProblem
from .debranges import ExtremalityReport, Kernel, Verdict
from .jacobi import Classification, JacobiMatrix
from .measures import DiscreteMeasure
from .sturm import SchrodingerProblem

__all__ = [
    "BesselProblem",
    "BracketCountError",
    "Classification",
    "DiscreteMeasure",
    "DomainError",
    "ExtremalityReport",
    "JacobiMatrix",
    "Kernel",
    "KreinLabError",
    "PrecisionOverflowError",
    "Profile",
    "QuadratureError",
    "ResolutionError",
    "SchrodingerProblem",
    "StiffnessError",
    "Verdict",
    "bessel",
    "debranges",
    "jacobi",
    "measures",
    "sturm",
]
__version__ = "0.1.0"
