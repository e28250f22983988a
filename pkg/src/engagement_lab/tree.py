"""Tree-structured feeds: ``d`` options per step instead of one.

At every step the user faces ``d`` branches.  System 1 takes control with
probability ``p_hat = 1 - prod(1 - p_i)`` and follows some branch (branch
``i`` with probability proportional to ``p_i``).  Otherwise system 2 looks at
the best of the ``d`` values and continues only if it clears a threshold
``tau*``.

The optimal threshold comes from a one-dimensional fixed point.  With

    c = v_bar p_hat q / (1 - p_hat q) - W / (1 - p_hat)
    b = q (1 - p_hat) / (1 - p_hat q)

the continuation value ``gamma`` of a system-2 decision solves
``gamma = M(gamma) = E[max(v + c + b gamma, 0)]`` over the max-value law.
``M`` has slope below one, so bisection on ``M(gamma) - gamma`` finds
``gamma*`` and the policy "continue iff v + c + b gamma* >= 0" is optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _streams
from ._validation import check_positive, check_positive_int, check_unit_interval
from .core import PARTICIPATION_RTOL
from .distributions import ValueDist, max_of
from .exceptions import NumericalError, ValidationError
from .simulation import BatchSummary, SessionArrays, summarize

__all__ = [
    "TreeConfig",
    "TreeSolution",
    "BranchingReport",
    "max_value_dist",
    "continuation_map",
    "threshold_value",
    "solve_tree",
    "simulate_tree_sessions",
    "simulate_tree",
    "iid_family",
    "optimize_branching",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = ("d", "p_hat", "tau_star", "gamma_star", "e_s", "e_t", "participates")
BISECTION_TOL = 1e-10
_TIE_TOL = 1e-9
_STREAM_TREE = 4


@dataclass(frozen=True)
class TreeConfig:
    d: int
    branch_p: tuple[float, ...]
    q: float
    branch_values: tuple[ValueDist, ...]
    w: float = 1.0

    def __post_init__(self):
        d = check_positive_int(self.d, "d")
        object.__setattr__(self, "d", d)
        if len(self.branch_p) != d or len(self.branch_values) != d:
            raise ValidationError(f"need exactly d={d} branch probabilities and value distributions")
        object.__setattr__(self, "branch_p", tuple(check_unit_interval(x, "p_i") for x in self.branch_p))
        object.__setattr__(self, "branch_values", tuple(self.branch_values))
        if not all(isinstance(v, ValueDist) for v in self.branch_values):
            raise ValidationError("branch_values must be ValueDist instances")
        object.__setattr__(self, "q", check_unit_interval(self.q, "q"))
        object.__setattr__(self, "w", check_positive(self.w, "w"))

    @classmethod
    def iid(cls, d: int, p: float, q: float, values: ValueDist, w: float = 1.0) -> "TreeConfig":
        d = check_positive_int(d, "d")
        return cls(d, (p,) * d, q, (values,) * d, w)

    @property
    def p_off(self) -> float:
        """``1 - p_hat``, kept separately since ``p_hat`` rounds to 1 for large ``d``."""
        return math.prod(1.0 - x for x in self.branch_p)

    @property
    def p_hat(self) -> float:
        return 1.0 - self.p_off

    @property
    def v_bar(self) -> float:
        """Mean value of the branch system 1 follows."""
        total = sum(self.branch_p)
        means = [dist.mean for dist in self.branch_values]
        if total == 0.0:
            return sum(means) / len(means)
        return sum(x * m for x, m in zip(self.branch_p, means)) / total

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "branch_p": list(self.branch_p),
            "q": self.q,
            "branch_values": [v.to_dict() for v in self.branch_values],
            "w": self.w,
        }


@dataclass(frozen=True)
class TreeSolution:
    p_hat: float
    v_bar: float
    gamma_star: float
    tau_star: float  # smallest accepted support value, inf when system 2 never continues
    e_s: float
    e_t: float
    participates: bool
    tau_raw: float = field(default=math.nan, compare=False)

    def __post_init__(self):
        if self.gamma_star < 0:
            raise NumericalError(f"negative continuation value {self.gamma_star!r}")

    def row(self, d: int) -> tuple:
        return (d, self.p_hat, self.tau_star, self.gamma_star, self.e_s, self.e_t, self.participates)


def max_value_dist(config: TreeConfig) -> ValueDist:
    return max_of(config.branch_values)


def _coefficients(config: TreeConfig) -> tuple[float, float]:
    ph, off, q = config.p_hat, config.p_off, config.q
    # 1 - p_hat q written as (1 - q) + q (1 - p_hat) to keep precision
    denom = (1.0 - q) + q * off
    c = config.v_bar * ph * q / denom - config.w / off
    b = q * off / denom
    return c, b


def continuation_map(config: TreeConfig, gamma: float, vmax: ValueDist | None = None) -> float:
    """``M(gamma) = E[max(v + c + b gamma, 0)]`` over the max-value law."""
    vmax = max_value_dist(config) if vmax is None else vmax
    c, b = _coefficients(config)
    vals = np.asarray(vmax.values)
    return float(np.dot(vmax.probs, np.maximum(vals + c + b * gamma, 0.0)))


def threshold_value(config: TreeConfig, tau: float, vmax: ValueDist | None = None) -> float:
    """``F(tau) = A(tau) / (1 - B(tau))``: continuation value of threshold ``tau``."""
    vmax = max_value_dist(config) if vmax is None else vmax
    c, b = _coefficients(config)
    pr = vmax.prob_ge(tau)
    a = vmax.partial_mean_ge(tau) + c * pr
    return a / (1.0 - b * pr)


def _fixed_point(config: TreeConfig, vmax: ValueDist) -> float:
    lo = 0.0
    hi = vmax.v_max / ((1.0 - config.q) * config.p_off)
    hi = max(hi, 1.0)
    cap = 2.0**60 * max(abs(vmax.v_max), 1.0)
    while continuation_map(config, hi, vmax) >= hi:
        hi *= 2.0
        if hi > cap:
            raise NumericalError("could not bracket the continuation fixed point")
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if continuation_map(config, mid, vmax) >= mid:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_tree(config: TreeConfig) -> TreeSolution:
    """Optimal threshold policy and its expected utility and engagement.

    The reported ``gamma_star`` is ``F(tau*)`` evaluated exactly on the
    chosen threshold, which agrees with the bisection estimate to within the
    bisection tolerance.
    """
    vmax = max_value_dist(config)
    ph, off, q, w, v_bar = config.p_hat, config.p_off, config.q, config.w, config.v_bar
    denom = (1.0 - q) + q * off
    c, b = _coefficients(config)
    gamma = _fixed_point(config, vmax)
    tau_raw = -c - gamma * b
    accepted = [v for v in vmax.values if v >= tau_raw - _TIE_TOL]
    tau = accepted[0] if accepted else math.inf
    f_tau = threshold_value(config, tau, vmax) if accepted else 0.0
    gamma_star = max(f_tau, 0.0)
    pr = vmax.prob_ge(tau)

    base = ph * (v_bar / denom - w / off)
    e_s = base + off / denom * gamma_star
    e_t = ph / off + pr / (denom * (1.0 - b * pr))
    scale = abs(base) + abs(off / denom * gamma_star)
    ok = e_s >= -PARTICIPATION_RTOL * max(scale, 1.0)
    if not ok:
        return TreeSolution(ph, v_bar, gamma_star, tau, 0.0, 0.0, False, tau_raw)
    return TreeSolution(ph, v_bar, gamma_star, tau, max(e_s, 0.0), e_t, True, tau_raw)


def _tree_lockstep(rng, n, config: TreeConfig, tau: float):
    d = config.d
    ph = config.p_hat
    weights = np.asarray(config.branch_p, float)
    weights = weights / weights.sum() if weights.sum() > 0 else None
    t = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    phase1 = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    interested = np.ones(n, dtype=bool)
    while idx.size:
        m = idx.size
        system1 = rng.random(m) < ph
        vals = np.empty((m, d))
        for i, dist in enumerate(config.branch_values):
            vals[:, i] = dist.sample(rng, m)
        if weights is not None and d > 1:
            branch = rng.choice(d, size=m, p=weights)
        else:
            branch = np.zeros(m, dtype=np.int64)
        best = vals.max(axis=1)
        followed = vals[np.arange(m), branch]
        live = interested[idx]
        stays = system1 | (live & (best >= tau))
        idx, system1, live = idx[stays], system1[stays], live[stays]
        gained = np.where(system1, followed[stays], best[stays])
        s[idx] += np.where(live, gained, 0.0) - config.w
        t[idx] += 1
        phase1[idx] += live
        keep = rng.random(idx.size) < config.q
        interested[idx] = live & keep
    return t, s, phase1


def simulate_tree_sessions(config: TreeConfig, solution: TreeSolution, replications: int, seed: int = 0) -> SessionArrays:
    """Step-level tree sessions under ``solution``'s threshold.

    Every step draws all ``d`` branch values.  ``phase1`` counts items
    consumed while system 2 still valued content.
    """
    replications = check_positive_int(replications, "replications")
    if not solution.participates:
        zeros = np.zeros(replications, np.int64)
        return SessionArrays(zeros, np.zeros(replications), zeros.copy())
    sizes = _streams.block_sizes(replications)

    def run(block, n):
        rng = _streams.block_generator(seed, block, _STREAM_TREE)
        return _tree_lockstep(rng, n, config, solution.tau_star)

    parts = _streams.map_blocks(run, sizes)
    return SessionArrays(*(np.concatenate([part[i] for part in parts]) for i in range(3)))


def simulate_tree(config: TreeConfig, solution: TreeSolution, replications: int, seed: int = 0) -> BatchSummary:
    return summarize(simulate_tree_sessions(config, solution, replications, seed), int(seed))


def iid_family(p: float, q: float, values: ValueDist, w: float = 1.0) -> Callable[[int], TreeConfig]:
    """``d -> TreeConfig`` with ``d`` identical branches."""
    return lambda d: TreeConfig.iid(d, p, q, values, w)


@dataclass(frozen=True)
class BranchingReport:
    d_s: int
    d_t: int
    table: tuple[tuple, ...]  # SWEEP_COLUMNS rows

    def to_dict(self) -> dict:
        return {"d_s": self.d_s, "d_t": self.d_t, "table": [dict(zip(SWEEP_COLUMNS, r)) for r in self.table]}


def optimize_branching(family: Callable[[int], TreeConfig], d_max: int = 20) -> BranchingReport:
    """Utility- and engagement-maximising branching factors over ``1..d_max``.

    Ties go to the smaller ``d``; 0 means no ``d`` admits participation.
    """
    d_max = check_positive_int(d_max, "d_max")
    rows = []
    best_s = best_t = None
    d_s = d_t = 0
    for d in range(1, d_max + 1):
        sol = solve_tree(family(d))
        rows.append(sol.row(d))
        if not sol.participates:
            continue
        if best_s is None or sol.e_s > best_s:
            best_s, d_s = sol.e_s, d
        if best_t is None or sol.e_t > best_t:
            best_t, d_t = sol.e_t, d
    return BranchingReport(d_s, d_t, tuple(rows))


def sweep_rows(family_of: Callable[[float, float], Callable[[int], TreeConfig]], ps: Sequence[float], qs: Sequence[float], d_max: int = 20) -> list[tuple]:
    """``(p, q, d_s, d_t)`` over a grid, the data behind a branching heatmap."""
    rows = []
    for p in ps:
        for q in qs:
            rep = optimize_branching(family_of(p, q), d_max)
            rows.append((float(p), float(q), rep.d_s, rep.d_t))
    return rows
