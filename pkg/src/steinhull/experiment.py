"""Monte-Carlo risk of the adaptive filters against exact oracle risks.

For each noise level on the grid the experiment simulates fresh data,
applies the penalized Stein filter and its unpenalized URE baseline, and
reports Monte-Carlo risks next to the exact blockwise and monotone oracle
risks.  Randomness is partitioned per replication, so results do not
depend on the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .blocks import BlockStats, block_stats, custom_scheme, weakly_geometric_scheme
from .config import ExperimentConfig
from .filters import apply_filter, blockwise_oracle, loss, monotone_oracle, quadratic_risk
from .model import OperatorSpectrum, SignalCoefficients, make_signal, observe, power_spectrum
from .penalties import PenaltyValues, ct_penalty, mc_penalty
from .stein import block_energies, penalized_stein_filter, ure_filter
from .streams import MonteCarlo, RandomStream, map_replications, mc_mean_se

__all__ = ["RiskRow", "RiskReport", "run_oracle_ratio"]

# independent randomness lanes under the master seed
_PENALTY_LANE = 0
_SIM_LANE = 1


@dataclass(frozen=True)
class RiskRow:
    epsilon: float
    estimator: str
    mc_risk: float
    mc_std_error: float
    oracle_risk_blockwise: float
    oracle_risk_monotone: float
    ratio_blockwise: float
    ratio_monotone: float
    max_pen_over_sigma2: float
    rho_eps: float


@dataclass(frozen=True)
class RiskReport:
    rows: tuple[RiskRow, ...]


@dataclass(frozen=True)
class _PairedLosses:
    """Picklable per-replication worker: one observation, both estimators."""

    spectrum: OperatorSpectrum
    signal: SignalCoefficients
    epsilon: float
    stats: BlockStats
    pen: PenaltyValues
    base: RandomStream

    def __call__(self, i: int) -> tuple[float, float]:
        obs = observe(self.spectrum, self.signal, self.epsilon, self.base.child(i))
        energies = block_energies(obs, self.stats.scheme, self.spectrum)
        penalized = penalized_stein_filter(energies, self.stats, self.pen)
        baseline = ure_filter(energies, self.stats)
        return (
            loss(apply_filter(penalized, obs, self.spectrum), self.signal),
            loss(apply_filter(baseline, obs, self.spectrum), self.signal),
        )


def _ratio(mc_risk: float, oracle_risk: float) -> float:
    if oracle_risk == 0.0:
        return math.nan
    return mc_risk / oracle_risk


def run_oracle_ratio(config: ExperimentConfig, workers: int = 1) -> RiskReport:
    """Run the risk-ratio experiment over the configured noise grid."""
    root = RandomStream(config.master_seed)
    signal = make_signal(config.signal_kind, list(config.signal_params), config.n_max)
    spectrum = power_spectrum(config.beta, config.b_scale, config.n_max)
    rows: list[RiskRow] = []
    for gi, epsilon in enumerate(config.epsilon_grid):
        if config.scheme == "custom":
            scheme = custom_scheme(list(config.boundaries))
        else:
            scheme = weakly_geometric_scheme(epsilon, spectrum)
        stats = block_stats(scheme, spectrum, epsilon)
        if config.penalty_kind == "ct":
            pen = ct_penalty(stats, config.penalty_gamma)
        else:
            pen = mc_penalty(
                stats, spectrum, config.penalty_alpha,
                MonteCarlo(reps=config.penalty_reps,
                           stream=root.child(_PENALTY_LANE).child(gi)),
                level=config.penalty_level,
            )
        oracle_b = quadratic_risk(blockwise_oracle(signal, stats), signal, spectrum, epsilon)
        oracle_m = quadratic_risk(monotone_oracle(signal, spectrum, epsilon),
                                  signal, spectrum, epsilon)
        worker = _PairedLosses(spectrum=spectrum, signal=signal, epsilon=epsilon,
                               stats=stats, pen=pen,
                               base=root.child(_SIM_LANE).child(gi))
        pairs = map_replications(worker, config.reps, workers=workers)
        max_pen_share = float(max(pen.values / stats.sigma2))
        for tag, losses in (("penalized_stein", [p[0] for p in pairs]),
                            ("ure", [p[1] for p in pairs])):
            mean, se = mc_mean_se(losses)
            rows.append(RiskRow(
                epsilon=float(epsilon),
                estimator=tag,
                mc_risk=mean,
                mc_std_error=se,
                oracle_risk_blockwise=oracle_b,
                oracle_risk_monotone=oracle_m,
                ratio_blockwise=_ratio(mean, oracle_b),
                ratio_monotone=_ratio(mean, oracle_m),
                max_pen_over_sigma2=max_pen_share,
                rho_eps=stats.rho_eps,
            ))
    return RiskReport(rows=tuple(rows))
