"""Seeded substreams and deterministic block parallelism.

Replications are grouped into fixed-size blocks.  Block ``k`` always draws
from a generator keyed by ``(seed, k)`` through :class:`numpy.random.SeedSequence`
spawn keys, so results do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

BLOCK_SIZE = 1 << 16
THREADS_ENV = "ENGAGEMENT_LAB_THREADS"

T = TypeVar("T")


def block_generator(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """Generator for replication block ``block`` of ``seed``.

    ``stream`` separates unrelated simulators sharing a seed.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.PCG64(ss))


def block_sizes(replications: int, block_size: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(replications), block_size)
    sizes = [block_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def map_blocks(fn: Callable[[int, int], T], sizes: list[int]) -> list[T]:
    """Apply ``fn(block_index, block_size)`` to every block, results in block order."""
    workers = min(worker_count(), len(sizes))
    if workers <= 1:
        return [fn(k, n) for k, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))
