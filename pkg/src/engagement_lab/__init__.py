"""Dual-system model of engagement versus utility on content platforms.

The closed forms live in :mod:`~engagement_lab.core`, the Monte Carlo
oracles in :mod:`~engagement_lab.simulation`, and each model extension in
its own module (manifolds, satiation, survey, population, tree).
"""

__version__ = "0.1.0"

from .core import (
    ContentParams,
    ModelPoint,
    OutsideOption,
    expected_engagement,
    expected_utility,
    g_engagement,
    g_utility,
    participates,
)
from .distributions import ValueDist
from .exceptions import (
    EngagementLabError,
    InfeasibleManifoldError,
    NumericalError,
    UnexplainedDisagreementError,
    ValidationError,
)

__all__ = [
    "__version__",
    "ContentParams",
    "ModelPoint",
    "OutsideOption",
    "ValueDist",
    "expected_engagement",
    "expected_utility",
    "g_engagement",
    "g_utility",
    "participates",
    "EngagementLabError",
    "InfeasibleManifoldError",
    "NumericalError",
    "UnexplainedDisagreementError",
    "ValidationError",
]
