"""Deterministic random streams and Monte-Carlo bookkeeping.

Every stochastic operation takes an explicit stream handle.  A stream is a
pure value (root seed plus spawn path); instantiating its generator twice
yields identical draws, and child streams are statistically independent of
each other and of the parent.  Replication-level parallelism derives one
child per replication, so aggregates do not depend on worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .validation import require

__all__ = ["RandomStream", "MonteCarlo", "mc_mean_se", "map_replications"]


@dataclass(frozen=True)
class RandomStream:
    """Value-semantics handle for a reproducible random source."""

    seed: int
    path: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        """Fresh generator for this stream; same stream, same draws."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.path))

    def child(self, index: int) -> "RandomStream":
        require(index >= 0, "stream child index must be nonnegative")
        return RandomStream(self.seed, self.path + (index,))


@dataclass(frozen=True)
class MonteCarlo:
    """Replication settings for a Monte-Carlo operation."""

    reps: int
    stream: RandomStream
    tol: float = 1e-6

    def __post_init__(self) -> None:
        require(self.reps >= 1, "reps must be positive")
        require(math.isfinite(self.tol) and self.tol > 0.0, "tol must be positive")


def mc_mean_se(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error via exactly rounded (order-independent) sums."""
    n = len(values)
    require(n >= 2, "need at least two replications for a standard error")
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return float(mean), float(math.sqrt(var / n))


def _run_chunk(fn: Callable[[int], float], indices: range) -> list[float]:
    return [fn(i) for i in indices]


def map_replications(
    fn: Callable[[int], float],
    reps: int,
    workers: int = 1,
) -> list[float]:
    """Evaluate ``fn(0..reps-1)`` and return results in replication order.

    ``fn`` must derive all randomness from the replication index (one child
    stream per index), which makes the output independent of ``workers``.
    """
    require(reps >= 1, "reps must be positive")
    require(workers >= 1, "workers must be positive")
    if workers == 1:
        return [fn(i) for i in range(reps)]
    chunk = -(-reps // workers)
    ranges = [range(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
    out: list[float] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, [fn] * len(ranges), ranges):
            out.extend(part)
    return out
