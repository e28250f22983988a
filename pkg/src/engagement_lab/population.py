"""Platform metrics over users with heterogeneous outside options.

Every user sees the same content ``(p, q, v_bar)`` but has their own
per-step outside option ``W``.  Because ``g_utility`` is linear in ``W``,

    g_S(W) = g_T * (W* - W),   W* = v_bar (1 - p) / ((1 - p) + p (1 - q)),

a user participates iff ``W <= W*`` and, once participating, engages for
``g_T`` items regardless of ``W``.  The platform therefore trades off how
many users show up (``pr_use``) against how long each stays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .core import ContentParams, g_engagement_array, participation_mask
from .exceptions import ValidationError

__all__ = [
    "Population",
    "PopulationMetrics",
    "participation_threshold",
    "population_metrics",
    "sample_metrics",
    "sweep_rows",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = ("p", "q", "v_bar", "pr_use", "e_t_given_use", "e_t_total", "e_s_total")


@dataclass(frozen=True)
class Population:
    """Distribution of the outside option ``W`` across users.

    ``kind`` is ``"uniform"`` (``params = (a, b)``) or ``"finite_support"``
    (``params`` holds the values, ``probs`` their weights).
    """

    kind: str
    params: tuple[float, ...]
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "uniform":
            if len(self.params) != 2:
                raise ValidationError("a uniform population needs (a, b)")
            a = check_positive(self.params[0], "a")
            b = check_positive(self.params[1], "b")
            if not a < b:
                raise ValidationError(f"uniform population needs a < b, got a={a!r}, b={b!r}")
            object.__setattr__(self, "params", (a, b))
        elif self.kind == "finite_support":
            if len(self.params) == 0 or len(self.params) != len(self.probs):
                raise ValidationError("finite population needs one probability per W value")
            vals = tuple(check_positive(w, "W") for w in self.params)
            probs = np.asarray(self.probs, float)
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ValidationError("population probabilities must be nonnegative and sum to 1")
            object.__setattr__(self, "params", vals)
            object.__setattr__(self, "probs", tuple(float(x) for x in probs))
        else:
            raise ValidationError(f"unknown population kind {self.kind!r}")

    @classmethod
    def uniform(cls, a: float, b: float) -> "Population":
        return cls("uniform", (a, b))

    @classmethod
    def finite(cls, support) -> "Population":
        """Build from ``[(w, prob), ...]``."""
        support = list(support)
        return cls("finite_support", tuple(w for w, _ in support), tuple(pr for _, pr in support))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.params[0], self.params[1], size)
        return rng.choice(np.asarray(self.params), size=size, p=np.asarray(self.probs))

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "a": self.params[0], "b": self.params[1]}
        return {"kind": "finite_support", "support": [list(x) for x in zip(self.params, self.probs)]}


@dataclass(frozen=True)
class PopulationMetrics:
    pr_use: float
    e_t_given_use: float
    e_t_total: float
    e_s_total: float

    def to_dict(self) -> dict:
        return {
            "pr_use": self.pr_use,
            "e_t_given_use": self.e_t_given_use,
            "e_t_total": self.e_t_total,
            "e_s_total": self.e_s_total,
        }


def participation_threshold(params: ContentParams) -> float:
    """Largest outside option ``W*`` at which the user still participates."""
    p, q, v = params.p, params.q, params.v_bar
    return v * (1.0 - p) / ((1.0 - p) + p * (1.0 - q))


def population_metrics(params: ContentParams, pop: Population) -> PopulationMetrics:
    """Participation rate, engagement and utility averaged over ``pop``.

    ``e_t_given_use`` is ``g_T`` even when nobody participates: it is the
    session length a participating user would have, which does not depend on
    ``W``.  ``e_s_total`` is the population mean of ``max(g_S, 0)``.
    """
    g_t = float(g_engagement_array(params.p, params.q))
    w_star = participation_threshold(params)
    if pop.kind == "uniform":
        a, b = pop.params
        pr_use = min(max((w_star - a) / (b - a), 0.0), 1.0)
        # integral of g_T (W* - W) over [a, min(W*, b)], divided by b - a
        if w_star <= a:
            e_s = 0.0
        else:
            u = min(w_star, b)
            e_s = g_t / (b - a) * ((w_star - a) ** 2 / 2.0 - (w_star - u) ** 2 / 2.0)
    else:
        ws = np.asarray(pop.params)
        probs = np.asarray(pop.probs)
        use = _uses(params, ws)
        pr_use = float(probs[use].sum())
        e_s = float(np.dot(probs, np.where(use, g_t * (w_star - ws), 0.0)))
        e_s = max(e_s, 0.0)
    return PopulationMetrics(pr_use, g_t, pr_use * g_t, e_s)


def _uses(params: ContentParams, ws: np.ndarray) -> np.ndarray:
    p, q, v = params.p, params.q, params.v_bar
    return participation_mask(v - ws, 1.0 - q, p * ws / (1.0 - p))


def sample_metrics(params: ContentParams, pop: Population, n: int, rng: np.random.Generator) -> dict:
    """Monte Carlo estimates (mean, standard error) of the four metrics.

    Each sampled user contributes their own closed-form ``S`` and ``T``.
    ``e_t_given_use`` is the mean over participating users only.
    """
    ws = pop.sample(rng, int(n))
    g_t = float(g_engagement_array(params.p, params.q))
    use = _uses(params, ws)
    s = np.where(use, g_t * (participation_threshold(params) - ws), 0.0)
    t = np.where(use, g_t, 0.0)
    out = {}
    for key, x in (("pr_use", use.astype(float)), ("e_t_total", t), ("e_s_total", s)):
        out[key] = (float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)))
    t_use = t[use]
    if t_use.size > 1:
        out["e_t_given_use"] = (float(t_use.mean()), float(t_use.std(ddof=1) / np.sqrt(t_use.size)))
    else:
        out["e_t_given_use"] = (g_t, 0.0)
    return out


def sweep_rows(points, pop: Population) -> list[tuple]:
    """One CSV row per ``(p, q, v_bar)`` in ``points``."""
    rows = []
    for p, q, v in points:
        m = population_metrics(ContentParams(p, q, v), pop)
        rows.append((float(p), float(q), float(v), m.pr_use, m.e_t_given_use, m.e_t_total, m.e_s_total))
    return rows
