"""Risk hulls for blockwise filters and their empirical verification.

A hull is a deterministic function of the filter meant to dominate the
random loss uniformly over the blockwise class, up to a margin C2 eps^2.
Variant V charges the penalty linearly (2 lam_j pen_j), variant W
quadratically (lam_j^2 pen_j), so W never exceeds V on [0, 1] and is the
sharper claim to verify.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockStats
from .filters import BlockFilter, blockwise_oracle, quadratic_risk
from .model import OperatorSpectrum, SignalCoefficients
from .penalties import BlockNoiseDraw, PenaltyValues, draw_eta
from .streams import MonteCarlo, mc_mean_se
from .validation import require

__all__ = [
    "HullSpec",
    "HullCheck",
    "CalibrationResult",
    "CalibrationError",
    "hull_value",
    "sup_loss_minus_hull",
    "verify_hull",
    "calibrate_B",
]


@dataclass(frozen=True)
class HullSpec:
    """Hull variant with its constants and per-block penalties."""

    variant: str
    B: float
    C2: float
    pen: PenaltyValues

    def __post_init__(self) -> None:
        require(self.variant in ("V", "W"), "variant must be V or W")
        require(np.isfinite(self.B) and self.B >= 0.0, "B must be nonnegative")
        require(np.isfinite(self.C2) and self.C2 >= 0.0, "C2 must be nonnegative")


@dataclass(frozen=True)
class HullCheck:
    """Monte-Carlo verdict on E sup (loss - hull) <= 0."""

    variant: str
    B: float
    C2: float
    mean: float
    std_error: float
    holds: bool
    reps: int


@dataclass(frozen=True)
class CalibrationResult:
    B: float
    profile: tuple[HullCheck, ...]


class CalibrationError(RuntimeError):
    """No grid value of B made the hull property hold."""

    def __init__(self, message: str, profile: tuple[HullCheck, ...]):
        super().__init__(message)
        self.profile = profile


def _block_signal_energy(signal: SignalCoefficients, stats: BlockStats) -> np.ndarray:
    scheme = stats.scheme
    require(len(signal) >= scheme.n, "signal does not cover the scheme")
    out = np.empty(scheme.n_blocks)
    for j in range(scheme.n_blocks):
        theta = signal.values[scheme.block_slice(j)]
        out[j] = np.dot(theta, theta)
    return out


def _tail(signal: SignalCoefficients, stats: BlockStats) -> float:
    beyond = signal.values[stats.scheme.n:]
    return float(np.dot(beyond, beyond) + signal.tail_energy)


def _oracle_risk(
    signal: SignalCoefficients,
    stats: BlockStats,
    spectrum: OperatorSpectrum,
) -> float:
    oracle = blockwise_oracle(signal, stats)
    return quadratic_risk(oracle, signal, spectrum, stats.epsilon)


def hull_value(
    spec: HullSpec,
    filt: BlockFilter,
    signal: SignalCoefficients,
    stats: BlockStats,
    spectrum: OperatorSpectrum,
) -> float:
    """Evaluate the hull at a blockwise filter.

    (1 + B rho) { sum_j [(1-lam_j)^2 s_j + lam_j^2 sigma2_j + pen term]
                  + tail } + C2 eps^2 + B rho R(theta, oracle).
    """
    require(filt.scheme.boundaries == stats.scheme.boundaries,
            "filter and stats use different schemes")
    require(spec.pen.values.size == stats.n_blocks, "penalty does not match the scheme")
    s = _block_signal_energy(signal, stats)
    lam = filt.values
    if spec.variant == "V":
        pen_term = 2.0 * lam * spec.pen.values
    else:
        pen_term = lam * lam * spec.pen.values
    body = float(np.sum((1.0 - lam) ** 2 * s + lam * lam * stats.sigma2 + pen_term))
    body += _tail(signal, stats)
    brho = spec.B * stats.rho_eps
    return float((1.0 + brho) * body + spec.C2 * stats.epsilon ** 2
                 + brho * _oracle_risk(signal, stats, spectrum))


def sup_loss_minus_hull(
    spec: HullSpec,
    draw: BlockNoiseDraw,
    signal: SignalCoefficients,
    stats: BlockStats,
    spectrum: OperatorSpectrum,
) -> float:
    """Exact supremum of loss - hull over all blockwise filters, one draw.

    The objective separates into one quadratic in lam_j per block, so the
    supremum is attained at an endpoint of [0, 1] or at the interior
    stationary point; no grid is involved.
    """
    require(draw.eta.size == stats.n_blocks, "draw does not match the scheme")
    require(spec.pen.values.size == stats.n_blocks, "penalty does not match the scheme")
    s = _block_signal_energy(signal, stats)
    brho = spec.B * stats.rho_eps
    one_plus = 1.0 + brho
    total = 0.0
    for j in range(stats.n_blocks):
        e_j = float(draw.noise_energy[j])
        x_j = float(draw.x[j])
        pen_j = float(spec.pen.values[j])
        if spec.variant == "V":
            a = -brho * s[j] + e_j - one_plus * stats.sigma2[j] + 2.0 * x_j
            b = 2.0 * brho * s[j] - 2.0 * x_j - 2.0 * one_plus * pen_j
        else:
            a = -brho * s[j] + e_j - one_plus * (stats.sigma2[j] + pen_j) + 2.0 * x_j
            b = 2.0 * brho * s[j] - 2.0 * x_j
        c = -brho * s[j]
        best = max(c, a + b + c)
        if a < 0.0:
            lam_star = -b / (2.0 * a)
            if 0.0 < lam_star < 1.0:
                best = max(best, a * lam_star * lam_star + b * lam_star + c)
        total += best
    total -= brho * _tail(signal, stats)
    total -= spec.C2 * stats.epsilon ** 2
    total -= brho * _oracle_risk(signal, stats, spectrum)
    return float(total)


def verify_hull(
    spec: HullSpec,
    signal: SignalCoefficients,
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    mc: MonteCarlo,
) -> HullCheck:
    """Monte-Carlo check of E sup (loss - hull) <= 0 at three standard errors."""
    require(mc.reps >= 1000, "verify_hull needs at least 10^3 replications")
    sups = [
        sup_loss_minus_hull(spec, draw_eta(stats, spectrum, mc.stream.child(i), signal),
                            signal, stats, spectrum)
        for i in range(mc.reps)
    ]
    mean, se = mc_mean_se(sups)
    return HullCheck(variant=spec.variant, B=spec.B, C2=spec.C2, mean=mean,
                     std_error=se, holds=mean + 3.0 * se <= 0.0, reps=mc.reps)


def calibrate_B(
    variant: str,
    C2: float,
    pen: PenaltyValues,
    signal: SignalCoefficients,
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    mc: MonteCarlo,
    grid: list[float],
) -> CalibrationResult:
    """Smallest grid B for which the hull property holds.

    All grid points are evaluated on the same draws, so the mean profile
    is exactly nonincreasing in B; raises CalibrationError (carrying the
    full profile) when no grid point succeeds.
    """
    require(len(grid) >= 1, "grid must be nonempty")
    require(all(np.isfinite(b) and b >= 0.0 for b in grid), "grid values must be nonnegative")
    require(mc.reps >= 1000, "calibrate_B needs at least 10^3 replications")
    draws = [draw_eta(stats, spectrum, mc.stream.child(i), signal) for i in range(mc.reps)]
    profile = []
    for b_val in sorted(grid):
        spec = HullSpec(variant=variant, B=float(b_val), C2=C2, pen=pen)
        sups = [sup_loss_minus_hull(spec, d, signal, stats, spectrum) for d in draws]
        mean, se = mc_mean_se(sups)
        profile.append(HullCheck(variant=variant, B=float(b_val), C2=C2, mean=mean,
                                 std_error=se, holds=mean + 3.0 * se <= 0.0, reps=mc.reps))
    result = tuple(profile)
    for check in result:
        if check.holds:
            return CalibrationResult(B=check.B, profile=result)
    raise CalibrationError("no grid value of B makes the hull property hold", result)
