"""Survey diagnostics: expected utility conditional on session length.

A post-session survey reveals (an estimate of) ``S``.  Binning by the
observed length ``T`` gives ``E[S | T = t] = v_bar E[T_q | T = t] - W t``,
where ``T_q`` is the phase-1 length.  With ``beta = q / p`` the conditional
phase-1 length has the closed form

    t beta^t / (beta^t - 1) - 1 / (beta - 1)        (p != q)
    (t + 1) / 2                                      (p == q)

Whether the curve rises or falls with ``t`` separates high-value content
from highly moreish content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ModelPoint, participates
from .exceptions import NumericalError, ValidationError
from .simulation import SessionArrays

__all__ = [
    "SurveyCurve",
    "RegimeReport",
    "conditional_phase1",
    "conditional_utility",
    "classify_regime",
    "regretful_use",
    "survey_curve",
    "binned_rows",
    "SWEEP_COLUMNS",
]

SCAN_CAP = 1_000_000
SWEEP_COLUMNS = ("t", "conditional_s_closed", "conditional_s_empirical", "n_samples")


def conditional_phase1(p: float, q: float, t: int) -> float:
    """``E[T_q | T = t]``."""
    if t < 1:
        raise ValidationError(f"session length t must be >= 1, got {t!r}")
    if p == 0.0:
        # no overrun: the whole session is phase 1
        return float(t)
    if q == 0.0:
        return 1.0
    if p == q:
        return (t + 1) / 2.0
    log_beta = math.log(q / p)
    beta = q / p
    if beta > 1.0:
        # t beta^t / (beta^t - 1) = t / (1 - beta^-t), stable for large t
        lead = t / -math.expm1(-t * log_beta)
    else:
        lead = t * math.exp(t * log_beta) / math.expm1(t * log_beta)
    return lead - 1.0 / (beta - 1.0)


def conditional_utility(point: ModelPoint, t: int) -> float:
    """``E[S | T = t]`` for a session that lasted ``t`` items."""
    t = int(t)
    return point.v_bar * conditional_phase1(point.p, point.q, t) - point.w * t


@dataclass(frozen=True)
class SurveyCurve:
    point: ModelPoint
    values: tuple[tuple[int, float], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.values]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("survey curve t values must be strictly increasing")


def survey_curve(point: ModelPoint, t_max: int) -> SurveyCurve:
    return SurveyCurve(point, tuple((t, conditional_utility(point, t)) for t in range(1, int(t_max) + 1)))


@dataclass(frozen=True)
class RegimeReport:
    regime: str  # q_eq_p, q_gt_p, q_lt_p
    monotone: str  # increasing_all, decreasing_all, eventually_increasing, eventually_decreasing
    t_star: Optional[int] = None

    @property
    def eventual_direction(self) -> str:
        """``"increasing"`` or ``"decreasing"``: the sign for all large ``t``.

        A curve that is monotone for every ``t`` is in particular eventually
        monotone, so ``decreasing_all`` reports ``"decreasing"`` here.
        """
        return "increasing" if "increasing" in self.monotone else "decreasing"


def _slope_condition(x: float) -> float:
    """``((x + 1)/x) (1 - ln(x + 1)/x)``, the continuous-time slope test in ``x = beta^t - 1``."""
    return (x + 1.0) / x * (1.0 - math.log1p(x) / x)


def _first_persistent_t(point: ModelPoint, increasing: bool) -> int:
    """Smallest ``t`` from which forward differences keep the promised sign.

    The slope test is monotone in ``x`` and ``x`` is monotone in ``t``, so
    the derivative changes sign once; each forward difference averages the
    derivative over one step, so once a difference has the right sign all
    later ones do too.  The scan finds the continuous crossing, then walks
    to the first forward difference with the right sign.
    """
    p, q, v, w = point.p, point.q, point.v_bar, point.w
    log_beta = math.log(q / p)
    target = w / v
    t = 1
    while t <= SCAN_CAP:
        x = math.expm1(t * log_beta)
        ok = _slope_condition(x) > target if increasing else _slope_condition(x) < target
        if ok:
            break
        t += 1
    else:
        raise NumericalError(f"regime switch not found within t <= {SCAN_CAP}")
    # step back while the discrete differences already have the right sign
    sign = 1.0 if increasing else -1.0
    while t > 1 and sign * (conditional_utility(point, t) - conditional_utility(point, t - 1)) > 0:
        t -= 1
    while sign * (conditional_utility(point, t + 1) - conditional_utility(point, t)) <= 0:
        t += 1
        if t > SCAN_CAP:
            raise NumericalError(f"regime switch not found within t <= {SCAN_CAP}")
    return t


def classify_regime(point: ModelPoint) -> RegimeReport:
    """Sort content into the survey regimes.

    ``t_star`` (when present) is the smallest ``t`` such that
    ``E[S | T = t]`` moves in the promised direction at every step from
    ``t`` on.
    """
    p, q, v, w = point.p, point.q, point.v_bar, point.w
    if q == p:
        return RegimeReport("q_eq_p", "increasing_all" if v > 2 * w else "decreasing_all")
    if q > p:
        if v > 2 * w:
            return RegimeReport("q_gt_p", "increasing_all")
        if p == 0.0:
            # every item is phase 1: E[S | T = t] = (v_bar - W) t
            return RegimeReport("q_gt_p", "increasing_all" if v > w else "decreasing_all")
        if v <= w:
            # the slope test tends to 1 from below, so it never beats W / v_bar >= 1
            return RegimeReport("q_gt_p", "decreasing_all")
        return RegimeReport("q_gt_p", "eventually_increasing", _first_persistent_t(point, True))
    if v < 2 * w or q == 0.0:
        # q = 0 gives E[S | T = t] = v_bar - W t
        return RegimeReport("q_lt_p", "decreasing_all")
    return RegimeReport("q_lt_p", "eventually_decreasing", _first_persistent_t(point, False))


def regretful_use(point: ModelPoint) -> float:
    """Expected consumption beyond the ``1/(1 - q)`` items system 2 wants."""
    if not participates(point):
        return 0.0
    return point.p / (1.0 - point.p)


def binned_rows(point: ModelPoint, sessions: SessionArrays, min_samples: int = 1) -> list[tuple]:
    """``(t, closed form, empirical mean S, n)`` for every observed length ``t >= 1``."""
    t = sessions.t
    counts = np.bincount(t)
    sums = np.bincount(t, weights=sessions.s)
    rows = []
    for length in range(1, counts.size):
        n = int(counts[length])
        if n >= min_samples and n > 0:
            rows.append((length, conditional_utility(point, length), float(sums[length] / n), n))
    return rows
