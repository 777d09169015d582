"""Flat key=value experiment configuration.

Files hold one ``key = value`` pair per line, with ``#`` comments and blank
lines ignored.  CLI overrides are merged on top of the file; the
environment variable STEINHULL_SEED, when set, overrides master_seed from
either source.  Unknown and duplicate keys are rejected by name.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .blocks import geometric_parameters
from .model import make_signal
from .validation import ValidationError, require

__all__ = ["ExperimentConfig", "parse_config", "CONFIG_KEYS", "SEED_ENV_VAR"]

SEED_ENV_VAR = "STEINHULL_SEED"

CONFIG_KEYS = (
    "epsilon",
    "epsilon_grid",
    "beta",
    "b_scale",
    "n_max",
    "signal.kind",
    "signal.params",
    "scheme",
    "boundaries",
    "penalty.kind",
    "penalty.gamma",
    "penalty.alpha",
    "penalty.level",
    "penalty.reps",
    "reps",
    "master_seed",
    "out",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated settings for the oracle-ratio experiment."""

    epsilon_grid: tuple[float, ...]
    beta: float = 1.0
    b_scale: float = 1.0
    n_max: int = 512
    signal_kind: str = ""
    signal_params: tuple[float, ...] = ()
    scheme: str = "weakly_geometric"
    boundaries: tuple[int, ...] | None = None
    penalty_kind: str = "mc"
    penalty_gamma: float = 0.25
    penalty_alpha: float = 0.5
    penalty_level: float | None = None
    penalty_reps: int = 10_000
    reps: int = 10_000
    master_seed: int = 0
    out: str | None = None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"config key {key}: not a number: {raw!r}") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"config key {key}: not an integer: {raw!r}") from None


def _parse_float_list(key: str, raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    return tuple(_parse_float(key, part) for part in raw.split(","))


def _parse_int_list(key: str, raw: str) -> tuple[int, ...]:
    return tuple(_parse_int(key, part) for part in raw.split(","))


def read_key_values(text: str) -> dict[str, str]:
    """Split config text into a key -> raw value map, rejecting duplicates."""
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValidationError(f"config line {lineno}: expected key = value, got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key in pairs:
            raise ValidationError(f"duplicate config key: {key}")
        pairs[key] = value.strip()
    return pairs


def parse_config(path: str | None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Load, merge and validate a configuration.

    ``overrides`` maps config keys to raw string values and wins over the
    file; STEINHULL_SEED wins over both for master_seed.
    """
    pairs: dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            pairs = read_key_values(fh.read())
    for key, value in (overrides or {}).items():
        pairs[key] = value
    unknown = [k for k in pairs if k not in CONFIG_KEYS]
    if unknown:
        raise ValidationError(f"unknown config key: {', '.join(sorted(unknown))}")

    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        pairs["master_seed"] = env_seed

    if "epsilon" in pairs and "epsilon_grid" in pairs:
        raise ValidationError("give either epsilon or epsilon_grid, not both")
    if "epsilon" in pairs:
        grid = (_parse_float("epsilon", pairs["epsilon"]),)
    elif "epsilon_grid" in pairs:
        grid = _parse_float_list("epsilon_grid", pairs["epsilon_grid"])
        require(len(grid) >= 1, "epsilon_grid must not be empty")
    else:
        raise ValidationError("config must set epsilon or epsilon_grid")
    require(all(0.0 < e for e in grid), "epsilon values must be positive")

    beta = _parse_float("beta", pairs.get("beta", "1"))
    b_scale = _parse_float("b_scale", pairs.get("b_scale", "1"))
    n_max = _parse_int("n_max", pairs.get("n_max", "512"))
    require(n_max >= 1, "n_max must be positive")
    require(beta >= 0.0, "beta must be nonnegative")
    require(b_scale > 0.0, "b_scale must be positive")

    if "signal.kind" not in pairs:
        raise ValidationError("config must set signal.kind")
    signal_kind = pairs["signal.kind"]
    signal_params = _parse_float_list("signal.params", pairs.get("signal.params", ""))
    make_signal(signal_kind, list(signal_params), n_max)  # fail fast on bad signals

    scheme = pairs.get("scheme", "weakly_geometric")
    require(scheme in ("weakly_geometric", "custom"),
            "scheme must be weakly_geometric or custom")
    boundaries: tuple[int, ...] | None = None
    if scheme == "custom":
        if "boundaries" not in pairs:
            raise ValidationError("custom scheme needs boundaries")
        boundaries = _parse_int_list("boundaries", pairs["boundaries"])
    elif "boundaries" in pairs:
        raise ValidationError("boundaries only apply to the custom scheme")
    if scheme == "weakly_geometric":
        for e in grid:
            geometric_parameters(e)  # rejects epsilon > exp(-1)

    penalty_kind = pairs.get("penalty.kind", "mc")
    require(penalty_kind in ("ct", "mc"), "penalty.kind must be ct or mc")
    penalty_gamma = _parse_float("penalty.gamma", pairs.get("penalty.gamma", "0.25"))
    require(0.0 < penalty_gamma <= 0.5, "penalty.gamma must lie in (0, 1/2]")
    penalty_alpha = _parse_float("penalty.alpha", pairs.get("penalty.alpha", "0.5"))
    require(penalty_alpha > 0.0, "penalty.alpha must be positive")
    penalty_level = None
    if "penalty.level" in pairs:
        penalty_level = _parse_float("penalty.level", pairs["penalty.level"])
        require(penalty_level > 0.0, "penalty.level must be positive")
    penalty_reps = _parse_int("penalty.reps", pairs.get("penalty.reps", "10000"))
    reps = _parse_int("reps", pairs.get("reps", "10000"))
    require(penalty_reps >= 2 and reps >= 2, "replication counts must be at least 2")
    master_seed = _parse_int("master_seed", pairs.get("master_seed", "0"))
    require(master_seed >= 0, "master_seed must be nonnegative")

    return ExperimentConfig(
        epsilon_grid=grid,
        beta=beta,
        b_scale=b_scale,
        n_max=n_max,
        signal_kind=signal_kind,
        signal_params=signal_params,
        scheme=scheme,
        boundaries=boundaries,
        penalty_kind=penalty_kind,
        penalty_gamma=penalty_gamma,
        penalty_alpha=penalty_alpha,
        penalty_level=penalty_level,
        penalty_reps=penalty_reps,
        reps=reps,
        master_seed=master_seed,
        out=pairs.get("out"),
    )
