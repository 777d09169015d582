"""Linear filter estimators and their quadratic risk.

A filter is a sequence of weights lambda_k in [0, 1]; the estimator is
theta_hat_k = lambda_k * b_k^-1 * y_k.  Blockwise filters are constant on
the blocks of a scheme and zero beyond it; monotone filters are
nonincreasing in k.  Oracles minimize the exact quadratic risk over each
class for a known signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockScheme, BlockStats
from .model import Observation, OperatorSpectrum, SignalCoefficients
from .validation import require

__all__ = [
    "BlockFilter",
    "MonotoneFilter",
    "filter_weights",
    "apply_filter",
    "quadratic_risk",
    "loss",
    "blockwise_oracle",
    "monotone_oracle",
]


@dataclass(frozen=True)
class BlockFilter:
    """One weight per block of a scheme, implicitly zero beyond it."""

    scheme: BlockScheme
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size == self.scheme.n_blocks,
                "need exactly one weight per block")
        require(bool(np.all((values >= 0.0) & (values <= 1.0))), "weights must lie in [0, 1]")


@dataclass(frozen=True)
class MonotoneFilter:
    """Per-index weights with 1 >= lambda_1 >= ... >= lambda_n >= 0."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size >= 1, "need at least one weight")
        require(bool(np.all((values >= 0.0) & (values <= 1.0))), "weights must lie in [0, 1]")
        require(bool(np.all(np.diff(values) <= 0.0)), "weights must be nonincreasing")


def filter_weights(filt: BlockFilter | MonotoneFilter, n: int) -> np.ndarray:
    """Per-index weights lambda_1..lambda_n, zero beyond the filter's support."""
    require(n >= 1, "n must be positive")
    out = np.zeros(n)
    if isinstance(filt, BlockFilter):
        require(n >= filt.scheme.n, "filter support exceeds the requested length")
        for j in range(filt.scheme.n_blocks):
            out[filt.scheme.block_slice(j)] = filt.values[j]
    else:
        require(n >= len(filt.values), "filter support exceeds the requested length")
        out[: filt.values.size] = filt.values
    return out


def apply_filter(
    filt: BlockFilter | MonotoneFilter,
    observation: Observation,
    spectrum: OperatorSpectrum,
) -> SignalCoefficients:
    """Estimate theta_hat_k = lambda_k * b_k^-1 * y_k over the observation."""
    n = len(observation)
    require(len(spectrum) == n, "spectrum and observation lengths must match")
    lam = filter_weights(filt, n)
    return SignalCoefficients(lam * observation.values / spectrum.values)


def quadratic_risk(
    filt: BlockFilter | MonotoneFilter,
    signal: SignalCoefficients,
    spectrum: OperatorSpectrum,
    epsilon: float,
) -> float:
    """Exact risk sum_k (1-lambda_k)^2 theta_k^2 + eps^2 lambda_k^2 b_k^-2 + tail."""
    require(np.isfinite(epsilon) and epsilon > 0.0, "epsilon must be positive")
    n = len(signal)
    require(len(spectrum) >= n, "spectrum does not cover the signal")
    lam = filter_weights(filt, n)
    bias = (1.0 - lam) * signal.values
    sd = epsilon * lam / spectrum.values[:n]
    return float(np.dot(bias, bias) + np.dot(sd, sd) + signal.tail_energy)


def loss(estimate: SignalCoefficients, signal: SignalCoefficients) -> float:
    """Squared distance plus the signal's energy beyond the estimate's support."""
    require(len(estimate) == len(signal), "estimate and signal lengths must match")
    diff = estimate.values - signal.values
    return float(np.dot(diff, diff) + signal.tail_energy)


def blockwise_oracle(signal: SignalCoefficients, stats: BlockStats) -> BlockFilter:
    """Risk-minimizing constant weight per block for a known signal.

    On block j the optimum is the signal share s_j / (sigma2_j + s_j) with
    s_j the block signal energy.
    """
    scheme = stats.scheme
    require(len(signal) >= scheme.n, "signal does not cover the scheme")
    values = np.empty(scheme.n_blocks)
    for j in range(scheme.n_blocks):
        theta = signal.values[scheme.block_slice(j)]
        s = np.dot(theta, theta)
        values[j] = s / (stats.sigma2[j] + s)
    return BlockFilter(scheme=scheme, values=values)


def _pava_nonincreasing(targets: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted least-squares fit under a nonincreasing constraint.

    Classic pool-adjacent-violators, merging left to right; exact up to
    float rounding of pooled weighted means.
    """
    vals: list[float] = []
    wts: list[float] = []
    cnts: list[int] = []
    for t, w in zip(targets, weights):
        vals.append(float(t))
        wts.append(float(w))
        cnts.append(1)
        while len(vals) >= 2 and vals[-2] < vals[-1]:
            v2, w2, c2 = vals.pop(), wts.pop(), cnts.pop()
            v1, w1, c1 = vals.pop(), wts.pop(), cnts.pop()
            wt = w1 + w2
            vals.append((v1 * w1 + v2 * w2) / wt)
            wts.append(wt)
            cnts.append(c1 + c2)
    return np.repeat(vals, cnts)


def monotone_oracle(
    signal: SignalCoefficients,
    spectrum: OperatorSpectrum,
    epsilon: float,
) -> MonotoneFilter:
    """Risk-minimizing nonincreasing filter for a known signal.

    The unconstrained per-index optimum is a_k = theta_k^2 / (theta_k^2 +
    eps^2 b_k^-2); the risk is a weighted least-squares distance to a_k
    with weights theta_k^2 + eps^2 b_k^-2, so the constrained optimum is
    the nonincreasing isotonic fit, computed exactly (no grid).
    """
    require(np.isfinite(epsilon) and epsilon > 0.0, "epsilon must be positive")
    n = len(signal)
    require(n >= 1, "signal must be nonempty")
    require(len(spectrum) >= n, "spectrum does not cover the signal")
    var = (epsilon / spectrum.values[:n]) ** 2
    theta2 = signal.values ** 2
    weights = theta2 + var
    targets = theta2 / weights
    fit = _pava_nonincreasing(targets, weights)
    return MonotoneFilter(np.clip(fit, 0.0, 1.0))
