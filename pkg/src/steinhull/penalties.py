"""Block penalties and the concentration bounds that justify them.

The centered block noise is eta_j = sum_{k in I_j} eps^2 b_k^-2 (xi_k^2 - 1),
with mean zero and variance 2 Sigma2_j.  Penalties tame its upper tail:
the deterministic choice pen_j = delta_j^gamma sigma2_j, and the
Monte-Carlo choice pen_j = (1 + alpha) U_j where U_j trims the empirical
tail functional u -> E[eta_j 1{eta_j >= u}] down to a target level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import BlockStats
from .model import OperatorSpectrum, SignalCoefficients
from .streams import MonteCarlo, RandomStream, mc_mean_se
from .validation import require

__all__ = [
    "PenaltyValues",
    "BlockNoiseDraw",
    "McEstimate",
    "A1Report",
    "A2Report",
    "ct_penalty",
    "explicit_penalty",
    "draw_eta",
    "excess_expectation",
    "mc_penalty",
    "lemma1_bound",
    "lemma2_bound",
    "check_a1",
    "check_a2",
]


@dataclass(frozen=True)
class PenaltyValues:
    """Nonnegative per-block penalties with the rule that produced them."""

    values: np.ndarray
    kind: str
    warning: str | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        require(values.ndim == 1 and values.size >= 1, "need at least one penalty value")
        require(bool(np.all(np.isfinite(values) & (values >= 0.0))),
                "penalties must be finite and nonnegative")
        require(self.kind in ("ct", "mc", "explicit"), "kind must be ct, mc or explicit")


@dataclass(frozen=True)
class BlockNoiseDraw:
    """One realization of the per-block noise functionals.

    noise_energy[j] = sum_{k in I_j} eps^2 b_k^-2 xi_k^2, eta[j] its
    centered version, and x[j] = eps sum_{k in I_j} theta_k b_k^-1 xi_k
    (zero when drawn without a signal).
    """

    eta: np.ndarray
    x: np.ndarray
    noise_energy: np.ndarray
    seed: int


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float


@dataclass(frozen=True)
class A1Report:
    """Exponential-sum diagnostic and the side condition phi_j <= 1 - 4 delta_j."""

    lhs: float
    side_condition_holds: bool


@dataclass(frozen=True)
class A2Report:
    """Normalized penalized excess sum_j E[eta_j - pen_j]_+ / eps^2."""

    normalized_sum: float
    std_error: float


def ct_penalty(stats: BlockStats, gamma: float) -> PenaltyValues:
    """Deterministic penalty pen_j = delta_j^gamma * sigma2_j.

    Requires 0 < gamma <= 1/2; gamma = 1/2 is accepted but flagged, since
    the exponential-sum condition backing the choice fails there.
    """
    require(np.isfinite(gamma) and 0.0 < gamma <= 0.5, "gamma must lie in (0, 1/2]")
    warning = None
    if gamma == 0.5:
        warning = "gamma = 1/2 sits on the boundary of the admissible range"
    return PenaltyValues(values=stats.delta ** gamma * stats.sigma2, kind="ct", warning=warning)


def explicit_penalty(values: np.ndarray | list[float]) -> PenaltyValues:
    """Wrap user-supplied per-block penalty values."""
    return PenaltyValues(values=np.asarray(values, dtype=float), kind="explicit")


def _block_variances(stats: BlockStats, spectrum: OperatorSpectrum, j: int) -> np.ndarray:
    scheme = stats.scheme
    require(len(spectrum) >= scheme.n, "spectrum does not cover the scheme")
    require(0 <= j < scheme.n_blocks, "block index out of range")
    return (stats.epsilon / spectrum.values[scheme.block_slice(j)]) ** 2


def draw_eta(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    stream: RandomStream,
    signal: SignalCoefficients | None = None,
) -> BlockNoiseDraw:
    """Draw eta_j, x_j and the raw noise energy for every block at once."""
    scheme = stats.scheme
    require(len(spectrum) >= scheme.n, "spectrum does not cover the scheme")
    if signal is not None:
        require(len(signal) >= scheme.n, "signal does not cover the scheme")
    xi = stream.generator().standard_normal(scheme.n)
    nb = scheme.n_blocks
    eta = np.empty(nb)
    x = np.zeros(nb)
    energy = np.empty(nb)
    b = spectrum.values[: scheme.n]
    var = (stats.epsilon / b) ** 2
    for j in range(nb):
        sl = scheme.block_slice(j)
        xij = xi[sl]
        energy[j] = np.dot(var[sl], xij * xij)
        eta[j] = energy[j] - stats.sigma2[j]
        if signal is not None:
            x[j] = stats.epsilon * np.dot(signal.values[sl] / b[sl], xij)
    return BlockNoiseDraw(eta=eta, x=x, noise_energy=energy, seed=stream.seed)


def _eta_samples(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    j: int,
    stream: RandomStream,
    reps: int,
) -> np.ndarray:
    """reps independent draws of eta_j, one child stream per replication."""
    var = _block_variances(stats, spectrum, j)
    sigma2 = float(stats.sigma2[j])
    root = np.random.SeedSequence(stream.seed, spawn_key=stream.path)
    out = np.empty(reps)
    for i, child in enumerate(root.spawn(reps)):
        xi = np.random.default_rng(child).standard_normal(var.size)
        out[i] = np.dot(var, xi * xi) - sigma2
    return out


def excess_expectation(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    j: int,
    pen_j: float,
    mc: MonteCarlo,
) -> McEstimate:
    """Monte-Carlo estimate of E[eta_j - pen_j]_+ with its standard error."""
    require(np.isfinite(pen_j) and pen_j >= 0.0, "pen_j must be nonnegative")
    require(mc.reps >= 1000, "excess_expectation needs at least 10^3 replications")
    samples = _eta_samples(stats, spectrum, j, mc.stream, mc.reps)
    excess = np.maximum(samples - pen_j, 0.0)
    mean, se = mc_mean_se(excess.tolist())
    return McEstimate(estimate=mean, std_error=se)


def _tail_functional(samples: np.ndarray, u: float) -> float:
    """Empirical mean of eta 1{eta >= u}; nonincreasing in u on u >= 0."""
    return math.fsum(samples[samples >= u]) / samples.size


def mc_penalty(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    alpha: float,
    mc: MonteCarlo,
    level: float | None = None,
) -> PenaltyValues:
    """Penalty (1 + alpha) U_j with U_j trimming the empirical tail to ``level``.

    U_j = inf{u >= 0 : mean of eta 1{eta >= u} <= level} is located by
    bisection over one fixed Monte-Carlo sample per block (the sample is
    reused across bisection steps, so the functional is exactly
    nonincreasing and the search is well posed).  level defaults to eps^2.
    """
    require(np.isfinite(alpha) and alpha > 0.0, "alpha must be positive")
    require(mc.reps >= 10_000, "mc_penalty needs at least 10^4 replications")
    require(mc.tol > 0.0, "bisection tolerance must be positive")
    if level is None:
        level = stats.epsilon ** 2
    require(np.isfinite(level) and level > 0.0, "level must be positive")
    nb = stats.n_blocks
    values = np.empty(nb)
    for j in range(nb):
        samples = _eta_samples(stats, spectrum, j, mc.stream.child(j), mc.reps)
        values[j] = (1.0 + alpha) * _trim_point(samples, level, mc.tol)
    return PenaltyValues(values=values, kind="mc")


def _trim_point(samples: np.ndarray, level: float, tol: float) -> float:
    if _tail_functional(samples, 0.0) <= level:
        return 0.0
    lo = 0.0
    hi = float(samples.max()) + tol
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _tail_functional(samples, mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi


def lemma1_bound(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    j: int,
    pen_j: float,
    delta: float,
) -> float:
    """Chernoff bound on E[eta_j - pen_j]_+ at tilt delta.

    Valid for 0 < delta < 1/(2 max_k eps^2 b_k^-2), the largest single-index
    variance in the block; the denominator uses that worst index uniformly.
    """
    require(np.isfinite(pen_j) and pen_j >= 0.0, "pen_j must be nonnegative")
    var = _block_variances(stats, spectrum, j)
    max_var = float(stats.max_var[j])
    require(np.isfinite(delta) and 0.0 < delta < 0.5 / max_var,
            "delta must lie in (0, 1/(2 max eps^2 b_k^-2))")
    third = float(np.sum(var ** 3))
    exponent = (
        -delta * pen_j
        + delta * delta * float(stats.Sigma2[j])
        + 4.0 * delta ** 3 * third / (1.0 - 2.0 * delta * max_var)
    )
    return float(math.exp(exponent) / delta)


def lemma2_bound(stats: BlockStats, j: int, C: float = 1.0) -> float:
    """Lower floor sqrt(2 Sigma2_j log(C eps^-4 Sigma2_j)) for the trim point.

    Returns 0 when the logarithm is not positive.
    """
    require(np.isfinite(C) and C > 0.0, "C must be positive")
    require(0 <= j < stats.n_blocks, "block index out of range")
    arg = C * stats.epsilon ** -4.0 * float(stats.Sigma2[j])
    if arg <= 1.0:
        return 0.0
    return float(math.sqrt(2.0 * float(stats.Sigma2[j]) * math.log(arg)))


def check_a1(stats: BlockStats, phi: np.ndarray | list[float]) -> A1Report:
    """Exponential-sum diagnostic for per-block ratios phi_j = pen_j / sigma2_j.

    lhs = sum_j max_{k in I_j} b_k^-2 exp[-phi_j^2 / (16 delta_j (1 + 2 sqrt(phi_j)))],
    and the side condition requires phi_j <= 1 - 4 delta_j on every block.
    """
    phi = np.asarray(phi, dtype=float)
    require(phi.shape == (stats.n_blocks,), "need one phi value per block")
    require(bool(np.all(np.isfinite(phi) & (phi > 0.0))), "phi values must be positive")
    max_b_inv2 = stats.max_var / stats.epsilon ** 2
    terms = max_b_inv2 * np.exp(-(phi ** 2) / (16.0 * stats.delta * (1.0 + 2.0 * np.sqrt(phi))))
    side = bool(np.all(phi <= 1.0 - 4.0 * stats.delta))
    return A1Report(lhs=float(terms.sum()), side_condition_holds=side)


def check_a2(
    stats: BlockStats,
    spectrum: OperatorSpectrum,
    pen: PenaltyValues,
    mc: MonteCarlo,
) -> A2Report:
    """Monte-Carlo estimate of sum_j E[eta_j - pen_j]_+ / eps^2."""
    require(pen.values.size == stats.n_blocks, "penalty does not match the scheme")
    require(mc.reps >= 10_000, "check_a2 needs at least 10^4 replications")
    total = 0.0
    var_total = 0.0
    for j in range(stats.n_blocks):
        est = excess_expectation(
            stats, spectrum, j, float(pen.values[j]),
            MonteCarlo(reps=mc.reps, stream=mc.stream.child(j), tol=mc.tol),
        )
        total += est.estimate
        var_total += est.std_error ** 2
    eps2 = stats.epsilon ** 2
    return A2Report(normalized_sum=total / eps2, std_error=math.sqrt(var_total) / eps2)
