"""Closed-form engagement and utility for the linear-feed dual-system model.

A user alternates control between an impulsive *system 1* and a forward
looking *system 2*.  Content is summarised by three numbers:

``p``  (moreishness)
    probability that an item hooks system 1 into taking the next one.
``q``  (span)
    per-step probability that system 2 still derives value next step.
``v_bar`` (value)
    mean per-item value to system 2.

A session has two phases.  In the first, system 2 collects ``v_bar - W`` per
item for a Geometric(1 - q) number of items.  In the second, system 1 keeps
the user going for a further Geometric(1 - p) - 1 items at a loss of ``W``
each.  Summing the two expectations gives :func:`g_utility` and
:func:`g_engagement`; the user participates only when the former is
nonnegative.

All evaluators are pure and total over the validated domain.  Validation
happens once, in the dataclass constructors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive, check_unit_interval

PARTICIPATION_RTOL = 1e-12

__all__ = [
    "ContentParams",
    "OutsideOption",
    "ModelPoint",
    "g_utility",
    "g_engagement",
    "participates",
    "expected_utility",
    "expected_engagement",
    "g_utility_array",
    "g_engagement_array",
    "participates_array",
    "participation_mask",
]


@dataclass(frozen=True)
class ContentParams:
    """A point ``(p, q, v_bar)`` of the content parameter space."""

    p: float
    q: float
    v_bar: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_unit_interval(self.p, "p"))
        object.__setattr__(self, "q", check_unit_interval(self.q, "q"))
        object.__setattr__(self, "v_bar", check_positive(self.v_bar, "v_bar"))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p, self.q, self.v_bar)


@dataclass(frozen=True)
class OutsideOption:
    """Per-step opportunity cost ``W`` of staying on the platform."""

    w: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "w", check_positive(self.w, "w"))


@dataclass(frozen=True)
class ModelPoint:
    params: ContentParams
    outside: OutsideOption = OutsideOption()

    @classmethod
    def of(cls, p: float, q: float, v_bar: float, w: float = 1.0) -> "ModelPoint":
        return cls(ContentParams(p, q, v_bar), OutsideOption(w))

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def q(self) -> float:
        return self.params.q

    @property
    def v_bar(self) -> float:
        return self.params.v_bar

    @property
    def w(self) -> float:
        return self.outside.w


def g_utility(point: ModelPoint) -> float:
    """Unclamped expected utility ``(v_bar - W)/(1 - q) - p W/(1 - p)``."""
    p, q, v, w = point.p, point.q, point.v_bar, point.w
    return (v - w) / (1.0 - q) - p * w / (1.0 - p)


def g_engagement(point: ModelPoint) -> float:
    """Expected session length ``1/(1 - q) + p/(1 - p)``, ignoring participation."""
    p, q = point.p, point.q
    return 1.0 / (1.0 - q) + p / (1.0 - p)


def participates(point: ModelPoint) -> bool:
    """Whether system 2 visits at all.

    The boundary ``g_utility == 0`` counts as participating, so an engagement
    maximiser sitting exactly on the zero-utility frontier still sees a
    nonzero session length.  "Zero" is judged up to :data:`PARTICIPATION_RTOL`
    relative to the two terms of ``g_utility``: decimal inputs such as
    ``p = 0.8`` are not exact in binary and would otherwise land a rounding
    error on the wrong side of the frontier.
    """
    p, q, v, w = point.p, point.q, point.v_bar, point.w
    return bool(participation_mask(v - w, 1.0 - q, p * w / (1.0 - p)))


def expected_utility(point: ModelPoint) -> float:
    return max(g_utility(point), 0.0)


def participation_mask(surplus, one_minus_q, overrun_cost):
    """``(surplus/one_minus_q - overrun_cost) >= 0`` with boundary tolerance.

    Works elementwise on arrays.
    """
    gain = np.asarray(surplus, float) / np.asarray(one_minus_q, float)
    cost = np.asarray(overrun_cost, float)
    slack = PARTICIPATION_RTOL * np.maximum(np.abs(gain) + np.abs(cost), 1.0)
    return gain - cost >= -slack


def expected_engagement(point: ModelPoint) -> float:
    if not participates(point):
        return 0.0
    return g_engagement(point)


def g_utility_array(p, q, v_bar, w) -> np.ndarray:
    """Vectorised :func:`g_utility` over broadcastable arrays (no validation)."""
    p, q, v_bar = np.asarray(p, float), np.asarray(q, float), np.asarray(v_bar, float)
    return (v_bar - w) / (1.0 - q) - p * w / (1.0 - p)


def g_engagement_array(p, q) -> np.ndarray:
    p, q = np.asarray(p, float), np.asarray(q, float)
    return 1.0 / (1.0 - q) + p / (1.0 - p)


def participates_array(p, q, v_bar, w) -> np.ndarray:
    p, q, v_bar = np.asarray(p, float), np.asarray(q, float), np.asarray(v_bar, float)
    return participation_mask(v_bar - w, 1.0 - q, p * w / (1.0 - p))
