"""Unbiased risk estimation and its penalized blockwise minimizer.

The block data energy is ||y~||^2_(j) = sum_{k in I_j} b_k^-2 y_k^2, whose
expectation is the block signal energy plus sigma2_j.  Plugging it into
the risk estimate and minimizing blockwise gives the classic Stein weight
(1 - sigma2_j / energy)_+; adding a penalty shifts the numerator to
sigma2_j + pen_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockScheme, BlockStats
from .filters import BlockFilter
from .model import Observation, OperatorSpectrum
from .penalties import PenaltyValues
from .validation import require

__all__ = [
    "BlockEnergies",
    "block_energies",
    "ure_filter",
    "penalized_stein_filter",
    "u_p",
]


@dataclass(frozen=True)
class BlockEnergies:
    """Operator-weighted data energy per block."""

    scheme: BlockScheme
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size == self.scheme.n_blocks,
                "need exactly one energy per block")
        require(bool(np.all(np.isfinite(values) & (values >= 0.0))),
                "energies must be finite and nonnegative")


def block_energies(
    observation: Observation,
    scheme: BlockScheme,
    spectrum: OperatorSpectrum,
) -> BlockEnergies:
    """Compute ||y~||^2_(j) = sum_{k in I_j} b_k^-2 y_k^2 for every block."""
    require(len(observation) >= scheme.n, "observation does not cover the scheme")
    require(len(spectrum) >= scheme.n, "spectrum does not cover the scheme")
    z = observation.values[: scheme.n] / spectrum.values[: scheme.n]
    values = np.empty(scheme.n_blocks)
    for j in range(scheme.n_blocks):
        zj = z[scheme.block_slice(j)]
        values[j] = np.dot(zj, zj)
    return BlockEnergies(scheme=scheme, values=values)


def _check_same_scheme(energies: BlockEnergies, stats: BlockStats) -> None:
    require(energies.scheme.boundaries == stats.scheme.boundaries,
            "energies and stats use different schemes")


def ure_filter(energies: BlockEnergies, stats: BlockStats) -> BlockFilter:
    """Unpenalized Stein weights (1 - sigma2_j / energy_j)_+ per block."""
    _check_same_scheme(energies, stats)
    values = np.zeros(stats.n_blocks)
    # divide only where the weight is positive so the quotient stays in (0, 1)
    pos = energies.values > stats.sigma2
    values[pos] = 1.0 - stats.sigma2[pos] / energies.values[pos]
    return BlockFilter(scheme=stats.scheme, values=values)


def penalized_stein_filter(
    energies: BlockEnergies,
    stats: BlockStats,
    pen: PenaltyValues,
) -> BlockFilter:
    """Minimizer (1 - (sigma2_j + pen_j) / energy_j)_+ of the penalized criterion."""
    _check_same_scheme(energies, stats)
    require(pen.values.size == stats.n_blocks, "penalty does not match the scheme")
    values = np.zeros(stats.n_blocks)
    pos = energies.values > stats.sigma2 + pen.values
    values[pos] = 1.0 - (stats.sigma2[pos] + pen.values[pos]) / energies.values[pos]
    return BlockFilter(scheme=stats.scheme, values=values)


def u_p(
    energies: BlockEnergies,
    stats: BlockStats,
    filt: BlockFilter,
    pen: PenaltyValues | None = None,
) -> float:
    """Penalized risk criterion evaluated at a blockwise filter.

    sum_j (lam_j^2 - 2 lam_j)(energy_j - sigma2_j) + lam_j^2 sigma2_j
          + 2 lam_j pen_j,
    with pen = None meaning the unpenalized criterion.  Up to the constant
    ||theta||^2 this is an unbiased estimate of the quadratic risk when
    pen is zero.
    """
    _check_same_scheme(energies, stats)
    require(filt.scheme.boundaries == stats.scheme.boundaries,
            "filter and stats use different schemes")
    lam = filt.values
    pen_values = np.zeros(stats.n_blocks) if pen is None else pen.values
    require(pen_values.size == stats.n_blocks, "penalty does not match the scheme")
    terms = (
        (lam * lam - 2.0 * lam) * (energies.values - stats.sigma2)
        + lam * lam * stats.sigma2
        + 2.0 * lam * pen_values
    )
    return float(terms.sum())
