"""Delimited report rendering and parsing.

All user-facing tables are plain CSV with 1-based indices, newline
terminated, floats printed with shortest round-trip precision so outputs
are byte-stable across runs.  Observation and block tables carry a final
``key=value`` footer line with their scalar metadata.
"""

from __future__ import annotations

import numpy as np

from .blocks import BlockStats
from .hulls import HullCheck
from .model import Observation, OperatorSpectrum, SignalCoefficients
from .penalties import PenaltyValues
from .validation import ValidationError, require

__all__ = [
    "fmt",
    "spectrum_csv",
    "signal_csv",
    "observation_csv",
    "read_observation_csv",
    "blocks_csv",
    "filter_csv",
    "estimate_csv",
    "penalty_csv",
    "hull_csv",
    "ratio_csv",
    "check_csv",
]

RATIO_HEADER = (
    "epsilon,estimator,mc_risk,mc_std_error,oracle_risk_blockwise,"
    "oracle_risk_monotone,ratio_blockwise,ratio_monotone,"
    "max_pen_over_sigma2,rho_eps"
)


def fmt(x: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


def _indexed_csv(header: str, values: np.ndarray) -> str:
    lines = [header]
    lines.extend(f"{k},{fmt(v)}" for k, v in enumerate(values, start=1))
    return "\n".join(lines) + "\n"


def spectrum_csv(spectrum: OperatorSpectrum) -> str:
    return _indexed_csv("k,b_k", spectrum.values)


def signal_csv(signal: SignalCoefficients) -> str:
    return _indexed_csv("k,theta_k", signal.values)


def estimate_csv(estimate: SignalCoefficients) -> str:
    return _indexed_csv("k,theta_hat_k", estimate.values)


def filter_csv(weights: np.ndarray) -> str:
    return _indexed_csv("k,lambda_k", weights)


def observation_csv(observation: Observation) -> str:
    body = _indexed_csv("k,y_k", observation.values)
    return body + f"epsilon={fmt(observation.epsilon)},seed={observation.seed}\n"


def read_observation_csv(text: str) -> Observation:
    """Parse the simulate output back into an Observation."""
    lines = [line for line in text.splitlines() if line.strip()]
    require(len(lines) >= 3, "observation file needs a header, rows and a footer")
    require(lines[0] == "k,y_k", "observation file must start with 'k,y_k'")
    footer = lines[-1]
    meta: dict[str, str] = {}
    for part in footer.split(","):
        if "=" not in part:
            raise ValidationError("observation footer must be epsilon=...,seed=...")
        key, value = part.split("=", 1)
        meta[key.strip()] = value.strip()
    require(set(meta) == {"epsilon", "seed"},
            "observation footer must carry exactly epsilon and seed")
    values = []
    for k, line in enumerate(lines[1:-1], start=1):
        fields = line.split(",")
        require(len(fields) == 2, f"malformed observation row: {line!r}")
        require(int(fields[0]) == k, "observation indices must run 1..n in order")
        values.append(float(fields[1]))
    return Observation(values=np.asarray(values), epsilon=float(meta["epsilon"]),
                       seed=int(meta["seed"]))


def blocks_csv(stats: BlockStats) -> str:
    scheme = stats.scheme
    lines = ["j,K_start,K_end,T_j,sigma2_j,Sigma2_j,Delta_j"]
    for j in range(scheme.n_blocks):
        start = scheme.boundaries[j]
        end = scheme.boundaries[j + 1] - 1
        lines.append(
            f"{j + 1},{start},{end},{end - start + 1},"
            f"{fmt(stats.sigma2[j])},{fmt(stats.Sigma2[j])},{fmt(stats.delta[j])}"
        )
    lines.append(f"rho_eps={fmt(stats.rho_eps)},N={scheme.n},J={scheme.n_blocks}")
    return "\n".join(lines) + "\n"


def penalty_csv(pen: PenaltyValues, stats: BlockStats, lemma2: list[float]) -> str:
    require(len(lemma2) == stats.n_blocks, "need one floor value per block")
    lines = ["j,pen_j,kind,lemma2_bound,sigma2_j"]
    for j in range(stats.n_blocks):
        lines.append(
            f"{j + 1},{fmt(pen.values[j])},{pen.kind},"
            f"{fmt(lemma2[j])},{fmt(stats.sigma2[j])}"
        )
    return "\n".join(lines) + "\n"


def hull_csv(checks: list[HullCheck]) -> str:
    lines = ["variant,B,C2,mean,std_error,holds"]
    for c in checks:
        lines.append(f"{c.variant},{fmt(c.B)},{fmt(c.C2)},{fmt(c.mean)},"
                     f"{fmt(c.std_error)},{_bool(c.holds)}")
    return "\n".join(lines) + "\n"


def ratio_csv(rows) -> str:
    lines = [RATIO_HEADER]
    for r in rows:
        lines.append(
            f"{fmt(r.epsilon)},{r.estimator},{fmt(r.mc_risk)},{fmt(r.mc_std_error)},"
            f"{fmt(r.oracle_risk_blockwise)},{fmt(r.oracle_risk_monotone)},"
            f"{fmt(r.ratio_blockwise)},{fmt(r.ratio_monotone)},"
            f"{fmt(r.max_pen_over_sigma2)},{fmt(r.rho_eps)}"
        )
    return "\n".join(lines) + "\n"


def check_csv(rows: list[tuple[str, float, str, bool]]) -> str:
    lines = ["check,value,threshold,holds"]
    for name, value, threshold, holds in rows:
        lines.append(f"{name},{fmt(value)},{threshold},{_bool(holds)}")
    return "\n".join(lines) + "\n"
