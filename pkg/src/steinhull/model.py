"""Gaussian sequence model with a known diagonal operator.

Observations follow y_k = b_k * theta_k + epsilon * xi_k for k = 1..n with
i.i.d. standard Gaussian xi_k.  The operator enters only through its
singular values b_k > 0, held nonincreasing so larger indices are harder to
recover.  All user-facing indices are 1-based; arrays are 0-based inside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .streams import RandomStream
from .validation import ValidationError, require

__all__ = [
    "OperatorSpectrum",
    "SignalCoefficients",
    "Observation",
    "power_spectrum",
    "make_signal",
    "observe",
]


@dataclass(frozen=True)
class OperatorSpectrum:
    """Singular values b_1 >= b_2 >= ... > 0 of the diagonal operator."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size >= 1, "spectrum must be a nonempty 1-d array")
        require(bool(np.all(np.isfinite(values))), "spectrum values must be finite")
        require(bool(np.all(values > 0.0)), "spectrum values must be strictly positive")
        require(bool(np.all(np.diff(values) <= 0.0)), "spectrum values must be nonincreasing")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SignalCoefficients:
    """Coefficients theta_1..theta_n plus declared energy beyond index n."""

    values: np.ndarray
    tail_energy: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1, "signal must be a 1-d array")
        require(bool(np.all(np.isfinite(values))), "signal values must be finite")
        require(np.isfinite(self.tail_energy) and self.tail_energy >= 0.0,
                "tail_energy must be finite and nonnegative")

    def __len__(self) -> int:
        return int(self.values.size)

    def energy(self) -> float:
        """Total squared norm including the declared tail."""
        return float(np.dot(self.values, self.values) + self.tail_energy)


@dataclass(frozen=True)
class Observation:
    """Noisy sequence data together with its noise level and seed provenance."""

    values: np.ndarray
    epsilon: float
    seed: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size >= 1, "observation must be a nonempty 1-d array")
        require(np.isfinite(self.epsilon) and self.epsilon > 0.0, "epsilon must be positive")

    def __len__(self) -> int:
        return int(self.values.size)


def power_spectrum(beta: float, scale: float, n_max: int) -> OperatorSpectrum:
    """Polynomially decaying singular values b_k = scale * k**(-beta).

    beta >= 0 keeps the sequence nonincreasing (beta = 0 gives the direct,
    well-posed problem); scale > 0.
    """
    require(np.isfinite(beta) and beta >= 0.0, "beta must be nonnegative")
    require(np.isfinite(scale) and scale > 0.0, "scale must be positive")
    require(n_max >= 1, "n_max must be positive")
    k = np.arange(1, n_max + 1, dtype=float)
    return OperatorSpectrum(scale * k ** (-beta))


def make_signal(kind: str, params: list[float], n_max: int) -> SignalCoefficients:
    """Construct a named test signal of length n_max.

    Kinds: zero (no params), spike (1-based index, amplitude),
    power_smooth (amplitude A, exponent s > 1/2 giving theta_k = A k**-s),
    exp_smooth (amplitude A, rate s giving theta_k = A exp(-s k)),
    explicit (the full coefficient list, one value per index).
    """
    require(n_max >= 1, "n_max must be positive")
    params = [float(p) for p in params]
    k = np.arange(1, n_max + 1, dtype=float)
    if kind == "zero":
        require(len(params) == 0, "zero signal takes no parameters")
        values = np.zeros(n_max)
    elif kind == "spike":
        require(len(params) == 2, "spike takes (index, amplitude)")
        index, amp = params
        require(float(index).is_integer(), "spike index must be an integer")
        index = int(index)
        require(1 <= index <= n_max, "spike index out of range")
        values = np.zeros(n_max)
        values[index - 1] = amp
    elif kind == "power_smooth":
        require(len(params) == 2, "power_smooth takes (amplitude, exponent)")
        amp, s = params
        require(s > 0.5, "power_smooth exponent must exceed 1/2")
        values = amp * k ** (-s)
    elif kind == "exp_smooth":
        require(len(params) == 2, "exp_smooth takes (amplitude, rate)")
        amp, s = params
        values = amp * np.exp(-s * k)
    elif kind == "explicit":
        require(len(params) == n_max, "explicit signal needs one value per index")
        values = np.asarray(params, dtype=float)
    else:
        raise ValidationError(f"unknown signal kind: {kind!r}")
    return SignalCoefficients(values)


def observe(
    spectrum: OperatorSpectrum,
    signal: SignalCoefficients,
    epsilon: float,
    stream: RandomStream,
) -> Observation:
    """Draw y_k = b_k * theta_k + epsilon * xi_k over the spectrum's length."""
    require(np.isfinite(epsilon) and epsilon > 0.0, "epsilon must be positive")
    require(len(signal) == len(spectrum), "signal and spectrum lengths must match")
    xi = stream.generator().standard_normal(len(spectrum))
    values = spectrum.values * signal.values + epsilon * xi
    return Observation(values=values, epsilon=float(epsilon), seed=stream.seed)
