"""Finite-support value distributions.

Per-item values only enter the closed forms through their mean, but the
simulators and the tree model need the full law.  Everything is kept on a
finite support so tail probabilities and partial expectations are exact sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._validation import check_finite
from .exceptions import ValidationError

__all__ = ["ValueDist", "max_of"]

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class ValueDist:
    """Distribution of a per-item value.

    ``kind`` is ``"point_mass"`` or ``"finite_support"``.  Support values are
    stored sorted ascending with duplicates merged.
    """

    kind: str
    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("point_mass", "finite_support"):
            raise ValidationError(f"unknown value distribution kind {self.kind!r}")
        if len(self.values) == 0 or len(self.values) != len(self.probs):
            raise ValidationError("support must be non-empty with one probability per value")
        vals = [check_finite(v, "support value") for v in self.values]
        probs = [float(pr) for pr in self.probs]
        if any(pr < 0 for pr in probs):
            raise ValidationError("support probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > _PROB_TOL:
            raise ValidationError(f"support probabilities must sum to 1 within 1e-12, got {sum(probs)!r}")
        if self.kind == "point_mass" and len(vals) != 1:
            raise ValidationError("a point mass has exactly one support value")
        merged: dict[float, float] = {}
        for v, pr in zip(vals, probs):
            merged[v] = merged.get(v, 0.0) + pr
        keys = sorted(merged)
        object.__setattr__(self, "values", tuple(keys))
        object.__setattr__(self, "probs", tuple(merged[k] for k in keys))

    @classmethod
    def point_mass(cls, value: float) -> "ValueDist":
        return cls("point_mass", (float(value),), (1.0,))

    @classmethod
    def finite(cls, support: Sequence[tuple[float, float]]) -> "ValueDist":
        """Build from ``[(value, prob), ...]``."""
        support = list(support)
        if len(support) == 1:
            return cls.point_mass(support[0][0])
        return cls("finite_support", tuple(v for v, _ in support), tuple(p for _, p in support))

    @property
    def support(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probs))

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    @property
    def v_max(self) -> float:
        return self.values[-1]

    def prob_ge(self, tau: float) -> float:
        """``Pr[v >= tau]``."""
        return float(sum(pr for v, pr in zip(self.values, self.probs) if v >= tau))

    def partial_mean_ge(self, tau: float) -> float:
        """``E[v * 1{v >= tau}]``."""
        return float(sum(v * pr for v, pr in zip(self.values, self.probs) if v >= tau))

    def cdf(self, x: float) -> float:
        return float(sum(pr for v, pr in zip(self.values, self.probs) if v <= x))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "point_mass":
            return np.full(size, self.values[0])
        return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probs))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "support": [[v, p] for v, p in self.support]}


def max_of(dists: Sequence[ValueDist]) -> ValueDist:
    """Exact law of ``max(X_1, ..., X_d)`` for independent ``X_i ~ dists[i]``.

    Uses the product of CDFs evaluated on the union of supports.
    """
    if len(dists) == 0:
        raise ValidationError("max_of needs at least one distribution")
    if len(dists) == 1:
        return dists[0]
    grid = sorted({v for dist in dists for v in dist.values})
    cdf = []
    for x in grid:
        prod = 1.0
        for dist in dists:
            prod *= dist.cdf(x)
        cdf.append(prod)
    support = []
    prev = 0.0
    for x, c in zip(grid, cdf):
        if c - prev > 0.0:
            support.append((x, c - prev))
        prev = c
    # product CDF at the top is an exact product of ones; renormalise rounding only
    total = sum(pr for _, pr in support)
    support = [(v, pr / total) for v, pr in support]
    return ValueDist.finite(support)
