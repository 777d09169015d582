"""Companion figures rendered next to delimited reports.

Each renderer takes the same data object the CSV writer received and
saves a PNG with fixed size, dpi and stripped metadata, so figure bytes
are as reproducible as the tables they accompany.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .blocks import BlockStats
from .hulls import HullCheck
from .penalties import PenaltyValues

__all__ = [
    "render_blocks_figure",
    "render_penalty_figure",
    "render_hull_figure",
    "render_ratio_figure",
]

_SAVE_OPTS = {"dpi": 130, "metadata": {"Software": None}}


def _save(fig, path: str) -> None:
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def render_blocks_figure(stats: BlockStats, path: str) -> None:
    """Block lengths and delta_j, with rho_eps^2 marked."""
    scheme = stats.scheme
    j = np.arange(1, scheme.n_blocks + 1)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    ax0.bar(j, scheme.lengths, color="tab:blue")
    ax0.set_xlabel("block j")
    ax0.set_ylabel("length T_j")
    ax1.bar(j, stats.delta, color="tab:orange")
    ax1.axhline(stats.rho_eps ** 2, color="k", linestyle="--", linewidth=1,
                label="max = rho_eps^2")
    ax1.set_xlabel("block j")
    ax1.set_ylabel("delta_j")
    ax1.set_ylim(0.0, 1.05)
    ax1.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_penalty_figure(pen: PenaltyValues, stats: BlockStats,
                          lemma2: list[float], path: str) -> None:
    """Penalties against their admissible range (floor to sigma2_j)."""
    j = np.arange(1, stats.n_blocks + 1)
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    ax.plot(j, stats.sigma2, "s--", color="tab:gray", label="sigma2_j")
    ax.plot(j, lemma2, "v--", color="tab:green", label="tail floor")
    ax.plot(j, pen.values, "o-", color="tab:red", label=f"pen_j ({pen.kind})")
    ax.set_xlabel("block j")
    ax.set_ylabel("value")
    if stats.n_blocks > 1:
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_hull_figure(checks: list[HullCheck], path: str) -> None:
    """Mean sup(loss - hull) with 3 SE bars per variant over B."""
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    for variant in sorted({c.variant for c in checks}):
        own = [c for c in checks if c.variant == variant]
        bs = [c.B for c in own]
        means = [c.mean for c in own]
        errs = [3.0 * c.std_error for c in own]
        ax.errorbar(bs, means, yerr=errs, marker="o", capsize=3, label=f"variant {variant}")
    ax.axhline(0.0, color="k", linewidth=1)
    ax.set_xlabel("B")
    ax.set_ylabel("mean sup(loss - hull)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_ratio_figure(rows, path: str) -> None:
    """Risk ratios over the noise grid, one line per estimator."""
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    for tag in sorted({r.estimator for r in rows}):
        own = sorted((r for r in rows if r.estimator == tag), key=lambda r: r.epsilon)
        eps = [r.epsilon for r in own]
        ax.plot(eps, [r.ratio_blockwise for r in own], "o-", label=f"{tag} / blockwise oracle")
        ax.plot(eps, [r.ratio_monotone for r in own], "s--", label=f"{tag} / monotone oracle")
    ax.set_xscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("risk ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
