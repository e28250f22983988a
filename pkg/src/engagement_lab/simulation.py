"""Step-level Monte Carlo simulation of the dual-system agent.

This is the independent oracle for the closed forms in :mod:`engagement_lab.core`.
Sessions are simulated item by item: after each consumed item system 2 stays
interested with probability ``q`` (once uninterested, forever), and system 1
independently fires with probability ``p``.  The user keeps consuming while
either system 2 is still interested or system 1 fired.  Phase 2 may therefore
have length zero, since the system-1 check also applies to the last item
system 2 wanted.

Batches are simulated in lockstep blocks of sessions; block ``k`` of a run
with seed ``s`` uses a generator keyed by ``(s, k)`` (see :mod:`._streams`),
which keeps results reproducible regardless of thread scheduling.

The capacity formulation (exponential capacity, random item sizes) is
provided for equivalence checks of the phase-1 length law.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _streams
from ._validation import check_positive, check_positive_int, check_simplex
from .core import ContentParams, ModelPoint, OutsideOption, participates
from .distributions import ValueDist
from .exceptions import ValidationError

__all__ = [
    "SimConfig",
    "StepRecord",
    "SessionOutcome",
    "SessionArrays",
    "BatchSummary",
    "CapacityConfig",
    "simulate_session",
    "simulate_sessions",
    "simulate_batch",
    "simulate_mixture_sessions",
    "simulate_mixture_batch",
    "simulate_capacity_session",
    "simulate_capacity_batch",
    "summarize",
]

MAX_TRACE_STEPS = 100_000

# stream ids keep unrelated simulators independent under a shared seed
_STREAM_LINEAR = 0
_STREAM_MIXTURE = 1
_STREAM_CAPACITY = 2


@dataclass(frozen=True)
class SimConfig:
    """Configuration of a linear-feed Monte Carlo run.

    ``value_dist`` defaults to a point mass at ``v_bar``; when given, its mean
    must equal ``v_bar``.  ``force_participation`` simulates sessions even for
    users who would stay away, which is useful for diagnosing ``g_utility < 0``.
    """

    point: ModelPoint
    value_dist: Optional[ValueDist] = None
    replications: int = 1
    seed: int = 0
    force_participation: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.value_dist is None:
            object.__setattr__(self, "value_dist", ValueDist.point_mass(self.point.v_bar))
        mean = self.value_dist.mean
        if abs(mean - self.point.v_bar) > 1e-12 * max(1.0, abs(self.point.v_bar)):
            raise ValidationError(f"value_dist mean {mean!r} differs from v_bar {self.point.v_bar!r}")
        object.__setattr__(self, "replications", check_positive_int(self.replications, "replications"))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class StepRecord:
    value: float
    system1_active: bool
    interested: bool  # I_t


@dataclass(frozen=True)
class SessionOutcome:
    t: int
    s: float
    phase1_len: int
    phase2_len: int
    trace: Optional[tuple[StepRecord, ...]] = None

    def __post_init__(self):
        if self.t != self.phase1_len + self.phase2_len:
            raise ValidationError("session length must equal phase1_len + phase2_len")
        if self.t == 0 and self.s != 0:
            raise ValidationError("an empty session has zero utility")


@dataclass
class SessionArrays:
    """Per-session results of a batch, in replication order."""

    t: np.ndarray
    s: np.ndarray
    phase1: np.ndarray

    @property
    def phase2(self) -> np.ndarray:
        return self.t - self.phase1

    def __len__(self):
        return self.t.size


@dataclass(frozen=True)
class BatchSummary:
    mean_t: float
    mean_s: float
    se_t: float
    se_s: float
    replications: int
    seed: int
    mean_phase2: float = 0.0
    se_phase2: float = 0.0
    t_histogram: tuple[int, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "mean_t": self.mean_t,
            "mean_s": self.mean_s,
            "se_t": self.se_t,
            "se_s": self.se_s,
            "replications": self.replications,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _se(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def summarize(arrays: SessionArrays, seed: int) -> BatchSummary:
    phase2 = arrays.phase2
    return BatchSummary(
        mean_t=float(np.mean(arrays.t)),
        mean_s=float(np.mean(arrays.s)),
        se_t=_se(arrays.t.astype(float)),
        se_s=_se(arrays.s),
        replications=len(arrays),
        seed=seed,
        mean_phase2=float(np.mean(phase2)),
        se_phase2=_se(phase2.astype(float)),
        t_histogram=tuple(int(c) for c in np.bincount(arrays.t)),
    )


def _lockstep(rng, n, sources, weights, w, record=False):
    """Simulate ``n`` participating sessions item by item.

    ``sources`` is a list of ``(p, q, ValueDist)``; with more than one source
    each item's source is drawn independently with probabilities ``weights``.
    Satiation after an item follows that item's span, while the system-1 pull
    into the next step follows the moreishness of the item waiting there, so
    no decision depends on the content it is made about.
    Returns ``(t, s, phase1, trace)``; ``trace`` is only built when ``record``.
    """
    t = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    ph1 = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    interested = np.ones(n, dtype=bool)
    k = len(sources)
    p_src = np.array([src[0] for src in sources])
    q_src = np.array([src[1] for src in sources])
    src = rng.choice(k, size=n, p=weights) if k > 1 else None
    trace = [] if record else None
    while idx.size:
        m = idx.size
        if k == 1:
            vals = sources[0][2].sample(rng, m)
            q_now = q_src[0]
        else:
            vals = np.empty(m)
            for j in range(k):
                mask = src == j
                cnt = int(mask.sum())
                if cnt:
                    vals[mask] = sources[j][2].sample(rng, cnt)
            q_now = q_src[src]
        s[idx] += np.where(interested, vals, 0.0) - w
        t[idx] += 1
        ph1[idx] += interested
        u_q = rng.random(m)
        u_p = rng.random(m)
        interested_next = interested & (u_q < q_now)
        if k == 1:
            system1 = u_p < p_src[0]
        else:
            src = rng.choice(k, size=m, p=weights)
            system1 = u_p < p_src[src]
        if record and len(trace) < MAX_TRACE_STEPS:
            trace.append(StepRecord(float(vals[0]), bool(system1[0]), bool(interested[0])))
        keep = interested_next | system1
        idx = idx[keep]
        interested = interested_next[keep]
        if k > 1:
            src = src[keep]
    return t, s, ph1, trace


def _linear_sources(config: SimConfig):
    return [(config.point.p, config.point.q, config.value_dist)]


def _gate(config: SimConfig) -> bool:
    return config.force_participation or participates(config.point)


def simulate_session(config: SimConfig, rng: np.random.Generator) -> SessionOutcome:
    """Simulate one session with generator ``rng``.

    A non-participating user (unless forced) produces ``T = 0, S = 0`` and
    consumes no randomness.
    """
    if not _gate(config):
        return SessionOutcome(0, 0.0, 0, 0, () if config.trace else None)
    t, s, ph1, trace = _lockstep(rng, 1, _linear_sources(config), None, config.point.w, record=config.trace)
    t0, p1 = int(t[0]), int(ph1[0])
    return SessionOutcome(t0, float(s[0]), p1, t0 - p1, tuple(trace) if config.trace else None)


def _run_blocks(replications, seed, stream, participate, body) -> SessionArrays:
    sizes = _streams.block_sizes(replications)
    if not participate:
        return SessionArrays(np.zeros(replications, np.int64), np.zeros(replications), np.zeros(replications, np.int64))

    def run(block, n):
        rng = _streams.block_generator(seed, block, stream)
        t, s, ph1, _ = body(rng, n)
        return t, s, ph1

    parts = _streams.map_blocks(run, sizes)
    return SessionArrays(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )


def simulate_sessions(config: SimConfig) -> SessionArrays:
    """Per-session ``(T, S, phase-1 length)`` for every replication."""
    sources = _linear_sources(config)
    return _run_blocks(
        config.replications,
        config.seed,
        _STREAM_LINEAR,
        _gate(config),
        lambda rng, n: _lockstep(rng, n, sources, None, config.point.w),
    )


def simulate_batch(config: SimConfig) -> BatchSummary:
    """Aggregate ``config.replications`` independent sessions.

    Deterministic for a fixed ``(seed, replications)``; with one replication
    it reproduces :func:`simulate_session` driven by block 0's generator.
    """
    return summarize(simulate_sessions(config), config.seed)


def _mixed_point(sources, weights, w) -> ModelPoint:
    p = sum(a * c.p for c, a in zip(sources, weights))
    q = sum(a * c.q for c, a in zip(sources, weights))
    v = sum(a * c.v_bar for c, a in zip(sources, weights))
    return ModelPoint(ContentParams(p, q, v), OutsideOption(w))


def simulate_mixture_sessions(
    sources: Sequence[tuple[ContentParams, float]],
    w: float = 1.0,
    replications: int = 1,
    seed: int = 0,
    value_dists: Optional[Sequence[ValueDist]] = None,
    force_participation: bool = False,
) -> SessionArrays:
    """Sessions whose items come from ``sources`` chosen independently per step.

    Each consumed item carries its own source's moreishness, span and value.
    System 2 decides whether to participate from the expected per-step
    characteristics, which are the weight-averaged parameters.
    """
    params = [c for c, _ in sources]
    weights = check_simplex([a for _, a in sources])
    w = check_positive(w, "w")
    replications = check_positive_int(replications, "replications")
    if value_dists is None:
        value_dists = [ValueDist.point_mass(c.v_bar) for c in params]
    if len(value_dists) != len(params):
        raise ValidationError("one value distribution per source is required")
    for c, dist in zip(params, value_dists):
        if abs(dist.mean - c.v_bar) > 1e-12 * max(1.0, c.v_bar):
            raise ValidationError("each source's value distribution must have mean v_bar")
    believed = _mixed_point(params, weights, w)
    gate = force_participation or participates(believed)
    src = [(c.p, c.q, dist) for c, dist in zip(params, value_dists)]
    return _run_blocks(replications, seed, _STREAM_MIXTURE, gate, lambda rng, n: _lockstep(rng, n, src, weights, w))


def simulate_mixture_batch(sources, w=1.0, replications=1, seed=0, value_dists=None, force_participation=False):
    arrays = simulate_mixture_sessions(sources, w, replications, seed, value_dists, force_participation)
    return summarize(arrays, int(seed))


@dataclass(frozen=True)
class CapacityConfig:
    """Capacity formulation of satiation.

    The user has a hidden capacity ``C ~ Exponential(lam)`` and each item has
    a random size drawn from ``size_dist``.  System 2 keeps deriving value
    while the cumulative size of the items before the current one is at most
    ``C``.  Memorylessness of ``C`` makes the continuation probability
    ``q = E[exp(-lam * size)]`` at every step.
    """

    size_dist: ValueDist
    lam: float = 1.0
    replications: int = 1
    seed: int = 0

    def __post_init__(self):
        if min(self.size_dist.values) < 0:
            raise ValidationError("item sizes must be nonnegative")
        object.__setattr__(self, "lam", check_positive(self.lam, "lam"))
        object.__setattr__(self, "replications", check_positive_int(self.replications, "replications"))
        if not (0.0 <= self.induced_q < 1.0):
            raise ValidationError(f"induced span q = E[exp(-lam s)] = {self.induced_q!r} must lie in [0, 1)")

    @property
    def induced_q(self) -> float:
        return float(sum(pr * math.exp(-self.lam * v) for v, pr in self.size_dist.support))


def _capacity_lockstep(rng, n, config: CapacityConfig) -> np.ndarray:
    capacity = rng.exponential(1.0 / config.lam, size=n)
    used = np.zeros(n)
    count = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    while idx.size:
        count[idx] += 1
        used[idx] += config.size_dist.sample(rng, idx.size)
        idx = idx[used[idx] <= capacity[idx]]
    return count


def simulate_capacity_session(config: CapacityConfig, rng: np.random.Generator) -> int:
    """Length of the run of items consumed before capacity is exceeded."""
    return int(_capacity_lockstep(rng, 1, config)[0])


def simulate_capacity_batch(config: CapacityConfig) -> np.ndarray:
    sizes = _streams.block_sizes(config.replications)

    def run(block, n):
        return _capacity_lockstep(_streams.block_generator(config.seed, block, _STREAM_CAPACITY), n, config)

    return np.concatenate(_streams.map_blocks(run, sizes))
