"""Numerical laboratory for degree bounds of circle maps via a nonlocal threshold integral."""

__version__ = "0.1.0"

from .intervals import IntervalSet
from .integral import (
    IntegralRequest,
    IntegralResult,
    integral_exact,
    integral_montecarlo,
    integral_quadrature,
    restricted_pair_integral,
    threshold_integral,
)
from .levels import LevelDecomposition, decompose, satisfied_set
from .plfn import Interval, PhaseFunction, PLFunction, degree
from .structure import AnalysisReport, structure_verdict, theorem_check

__all__ = [
    "Interval",
    "IntervalSet",
    "PLFunction",
    "PhaseFunction",
    "degree",
    "IntegralRequest",
    "IntegralResult",
    "integral_exact",
    "integral_quadrature",
    "integral_montecarlo",
    "restricted_pair_integral",
    "threshold_integral",
    "LevelDecomposition",
    "decompose",
    "satisfied_set",
    "AnalysisReport",
    "structure_verdict",
    "theorem_check",
]
