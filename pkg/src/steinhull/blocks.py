"""Block partitions of the frequency axis and their noise statistics.

A block scheme is a list of 1-based boundaries K_0 = 1 < K_1 < ... < K_J,
block j covering indices K_{j-1} .. K_j - 1 and estimation stopping at
N = K_J - 1.  The weakly geometric construction grows block lengths by the
slowly varying factor (1 + kappa_eps) and caps the bandwidth at the largest
N feasible under the variance budget (log nu_eps)^3 / epsilon^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import OperatorSpectrum
from .validation import require

__all__ = [
    "BlockScheme",
    "BlockStats",
    "RatioReport",
    "strict_ceil",
    "geometric_parameters",
    "planned_block_lengths",
    "weakly_geometric_scheme",
    "custom_scheme",
    "block_stats",
    "check_ratio_condition",
]


def strict_ceil(x: float) -> int:
    """Smallest integer strictly greater than x (so strict_ceil(3) = 4)."""
    require(math.isfinite(x), "strict_ceil needs a finite argument")
    return math.floor(x) + 1


@dataclass(frozen=True)
class BlockScheme:
    """Boundaries K_0 < K_1 < ... < K_J with K_0 = 1, all 1-based."""

    boundaries: tuple[int, ...]

    def __post_init__(self) -> None:
        ks = tuple(int(k) for k in self.boundaries)
        object.__setattr__(self, "boundaries", ks)
        require(len(ks) >= 2, "a scheme needs at least one block")
        require(ks[0] == 1, "boundaries must start at 1")
        require(all(a < b for a, b in zip(ks, ks[1:])), "boundaries must be strictly increasing")

    @property
    def n_blocks(self) -> int:
        return len(self.boundaries) - 1

    @property
    def n(self) -> int:
        """Last estimated index N = K_J - 1."""
        return self.boundaries[-1] - 1

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.boundaries, self.boundaries[1:]))

    def block_slice(self, j: int) -> slice:
        """0-based array slice for block j (j = 0..J-1)."""
        require(0 <= j < self.n_blocks, "block index out of range")
        return slice(self.boundaries[j] - 1, self.boundaries[j + 1] - 1)


@dataclass(frozen=True)
class BlockStats:
    """Per-block noise summaries at a given noise level.

    sigma2[j] is the block noise energy sum of eps^2 b_k^-2, Sigma2[j] the
    sum of eps^4 b_k^-4, max_var[j] the largest single-index variance, and
    delta[j] = max_var[j] / sigma2[j] in (0, 1].
    """

    scheme: BlockScheme
    epsilon: float
    sigma2: np.ndarray
    Sigma2: np.ndarray
    max_var: np.ndarray
    delta: np.ndarray
    rho_eps: float

    @property
    def n_blocks(self) -> int:
        return self.scheme.n_blocks


@dataclass(frozen=True)
class RatioReport:
    """Consecutive block noise-energy ratios against a tolerance eta."""

    ratios: tuple[float, ...]
    max_ratio: float | None
    eta: float
    holds: bool


def geometric_parameters(epsilon: float) -> tuple[int, float]:
    """(nu_eps, kappa_eps) for the weakly geometric construction.

    nu_eps = strict_ceil(log(1/epsilon)) must be at least 2, which holds
    exactly when epsilon <= exp(-1).
    """
    require(np.isfinite(epsilon) and epsilon > 0.0, "epsilon must be positive")
    nu = strict_ceil(math.log(1.0 / epsilon))
    require(nu >= 2, "epsilon must be at most exp(-1) for a weakly geometric scheme")
    return nu, 1.0 / math.log(nu)


def planned_block_lengths(epsilon: float, count: int) -> list[int]:
    """First ``count`` untruncated lengths T_j = strict_ceil(nu (1+kappa)^(j-1))."""
    require(count >= 1, "count must be positive")
    nu, kappa = geometric_parameters(epsilon)
    return [strict_ceil(nu * (1.0 + kappa) ** (j - 1)) for j in range(1, count + 1)]


def weakly_geometric_scheme(epsilon: float, spectrum: OperatorSpectrum) -> BlockScheme:
    """Weakly geometric blocks truncated at the feasible bandwidth.

    The bandwidth N is the largest m with sum_{k<=m} b_k^-2 within the
    budget (log nu_eps)^3 / epsilon^2; the final block is clipped so the
    boundaries end at N + 1.  A clipped final block of length one is merged
    into its predecessor: a singleton block has delta = 1, which defeats
    the small-rho regime the construction exists to provide.
    """
    nu, kappa = geometric_parameters(epsilon)
    budget = math.log(nu) ** 3 / (epsilon * epsilon)
    prefix = np.cumsum(spectrum.values ** -2.0)
    n_bar = int(np.searchsorted(prefix, budget, side="right"))
    require(n_bar >= 1, "variance budget excludes even the first index")
    require(n_bar < len(spectrum),
            "spectrum too short to certify the estimation bandwidth; extend n_max")
    ks = [1]
    j = 1
    while ks[-1] <= n_bar:
        ks.append(ks[-1] + strict_ceil(nu * (1.0 + kappa) ** (j - 1)))
        j += 1
    ks[-1] = n_bar + 1
    if len(ks) >= 3 and ks[-1] == ks[-2]:
        ks.pop()
    if len(ks) >= 3 and ks[-1] - ks[-2] == 1:
        del ks[-2]
    return BlockScheme(tuple(ks))


def custom_scheme(boundaries: list[int]) -> BlockScheme:
    """Scheme from explicit 1-based boundaries (first must be 1)."""
    return BlockScheme(tuple(int(b) for b in boundaries))


def block_stats(scheme: BlockScheme, spectrum: OperatorSpectrum, epsilon: float) -> BlockStats:
    """Noise energy, fourth-moment sum, peak variance and delta per block."""
    require(np.isfinite(epsilon) and epsilon > 0.0, "epsilon must be positive")
    require(len(spectrum) >= scheme.n, "spectrum does not cover the scheme")
    var = (epsilon / spectrum.values[: scheme.n]) ** 2
    nb = scheme.n_blocks
    sigma2 = np.empty(nb)
    Sigma2 = np.empty(nb)
    max_var = np.empty(nb)
    for j in range(nb):
        v = var[scheme.block_slice(j)]
        sigma2[j] = v.sum()
        Sigma2[j] = np.dot(v, v)
        max_var[j] = v.max()
    delta = max_var / sigma2
    return BlockStats(
        scheme=scheme,
        epsilon=float(epsilon),
        sigma2=sigma2,
        Sigma2=Sigma2,
        max_var=max_var,
        delta=delta,
        rho_eps=float(np.sqrt(delta.max())),
    )


def check_ratio_condition(stats: BlockStats, eta: float) -> RatioReport:
    """Check sigma2[j+1] / sigma2[j] <= 1 + eta for all consecutive blocks."""
    require(0.0 < eta < 0.5, "eta must lie in (0, 1/2)")
    ratios = tuple(float(r) for r in stats.sigma2[1:] / stats.sigma2[:-1])
    if not ratios:
        return RatioReport(ratios=(), max_ratio=None, eta=float(eta), holds=True)
    max_ratio = max(ratios)
    return RatioReport(ratios=ratios, max_ratio=max_ratio, eta=float(eta),
                       holds=max_ratio <= 1.0 + eta)
