"""Deterministic geometric satiation variant.

Here system 2's value for item ``t`` is ``gamma**t * v_t`` instead of a
random on/off interest.  When system 2 is in control at time ``t`` it
compares the value it expects until it next regains control against the
outside option, which yields a cutoff ``t*``: continue at every system-2
decision time ``t <= t*``, leave at the first one after it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _streams
from ._validation import check_positive, check_positive_int, check_unit_interval
from .simulation import SessionArrays, summarize

__all__ = [
    "GammaPoint",
    "continues_at",
    "t_star",
    "gamma_engagement",
    "gamma_utility",
    "simulate_gamma_sessions",
    "simulate_gamma_batch",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = ("p", "gamma", "v_bar", "w", "t_star", "e_t", "e_s")
_STREAM_GAMMA = 3


@dataclass(frozen=True)
class GammaPoint:
    p: float
    gamma: float
    v_bar: float
    w: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p", check_unit_interval(self.p, "p"))
        object.__setattr__(self, "gamma", check_unit_interval(self.gamma, "gamma"))
        object.__setattr__(self, "v_bar", check_positive(self.v_bar, "v_bar"))
        object.__setattr__(self, "w", check_positive(self.w, "w"))


def continues_at(point: GammaPoint, t: int) -> bool:
    """System 2's continuation condition ``v_bar gamma^t / W >= (1 - p gamma)/(1 - p)``.

    Equality counts as continuing.
    """
    p, g = point.p, point.gamma
    return point.v_bar * g**t / point.w >= (1.0 - p * g) / (1.0 - p)


def t_star(point: GammaPoint) -> int:
    """Last time at which system 2 still chooses to continue.

    ``-1`` means the user never participates.  For ``gamma = 0`` the
    logarithmic formula is undefined and only ``t = 0`` can satisfy the
    condition.
    """
    p, g, v, w = point.p, point.gamma, point.v_bar, point.w
    if g == 0.0:
        return 0 if continues_at(point, 0) else -1
    ratio = w * (1.0 - p * g) / (v * (1.0 - p))
    k = math.floor(math.log(ratio) / math.log(g))
    # the log quotient can land an ulp off an integer; settle with the exact condition
    if continues_at(point, k + 1):
        k += 1
    elif not continues_at(point, k):
        k -= 1
    # the formula extrapolates to negative times when even item 0 fails the test
    return max(k, -1)


def gamma_engagement(point: GammaPoint) -> float:
    ts = t_star(point)
    if ts < 0:
        return 0.0
    return ts + 1.0 / (1.0 - point.p)


def gamma_utility(point: GammaPoint) -> float:
    ts = t_star(point)
    if ts < 0:
        return 0.0
    p, g, v, w = point.p, point.gamma, point.v_bar, point.w
    gt = g**ts
    return v * ((1.0 - gt) / (1.0 - g) + gt / (1.0 - p * g)) - w * (ts + 1.0 / (1.0 - p))


def _gamma_lockstep(rng, n, point: GammaPoint, ts: int):
    """Sessions of the satiation variant, item by item.

    Before each item after the first, system 1 is in control with probability
    ``p``; otherwise system 2 decides with :func:`continues_at`.  ``t*`` is
    used only to label the phase-1 count, never to drive behaviour.
    """
    t = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    idx = np.arange(n)
    step = 0
    while idx.size:
        if step > 0:
            system1 = rng.random(idx.size) < point.p
            if not continues_at(point, step):
                idx = idx[system1]
                if not idx.size:
                    break
        s[idx] += point.v_bar * point.gamma**step - point.w
        t[idx] += 1
        step += 1
    return t, s, np.minimum(t, ts + 1)


def simulate_gamma_sessions(point: GammaPoint, replications: int, seed: int = 0) -> SessionArrays:
    """Per-session ``(T, S)``; ``phase1`` holds the items consumed up to ``t*``."""
    replications = check_positive_int(replications, "replications")
    ts = t_star(point)
    if not continues_at(point, 0):
        zeros = np.zeros(replications, np.int64)
        return SessionArrays(zeros, np.zeros(replications), zeros.copy())
    sizes = _streams.block_sizes(replications)

    def run(block, n):
        return _gamma_lockstep(_streams.block_generator(seed, block, _STREAM_GAMMA), n, point, ts)

    parts = _streams.map_blocks(run, sizes)
    return SessionArrays(*(np.concatenate([part[i] for part in parts]) for i in range(3)))


def simulate_gamma_batch(point: GammaPoint, replications: int, seed: int = 0):
    return summarize(simulate_gamma_sessions(point, replications, seed), int(seed))


def sweep_rows(gammas, ps, v_bar=3.0, w=1.0) -> list[tuple]:
    rows = []
    for g in gammas:
        for p in ps:
            pt = GammaPoint(p, g, v_bar, w)
            rows.append((float(p), float(g), float(v_bar), float(w), t_star(pt), gamma_engagement(pt), gamma_utility(pt)))
    return rows
