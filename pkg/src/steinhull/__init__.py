"""Adaptive blockwise Stein estimation for Gaussian sequence inverse problems.

The package covers the full pipeline: sequence-space model and operator
spectra, weakly geometric block schemes, blockwise and monotone oracle
filters, penalized unbiased risk estimation, penalty rules with their
concentration diagnostics, risk-hull verification, and a reproducible
experiment harness with a CLI.
"""

from .blocks import (
    BlockScheme,
    BlockStats,
    RatioReport,
    block_stats,
    check_ratio_condition,
    custom_scheme,
    geometric_parameters,
    planned_block_lengths,
    strict_ceil,
    weakly_geometric_scheme,
)
from .config import ExperimentConfig, parse_config
from .experiment import RiskReport, RiskRow, run_oracle_ratio
from .filters import (
    BlockFilter,
    MonotoneFilter,
    apply_filter,
    blockwise_oracle,
    filter_weights,
    loss,
    monotone_oracle,
    quadratic_risk,
)
from .hulls import (
    CalibrationError,
    CalibrationResult,
    HullCheck,
    HullSpec,
    calibrate_B,
    hull_value,
    sup_loss_minus_hull,
    verify_hull,
)
from .model import (
    Observation,
    OperatorSpectrum,
    SignalCoefficients,
    make_signal,
    observe,
    power_spectrum,
)
from .penalties import (
    A1Report,
    A2Report,
    BlockNoiseDraw,
    McEstimate,
    PenaltyValues,
    check_a1,
    check_a2,
    ct_penalty,
    draw_eta,
    excess_expectation,
    explicit_penalty,
    lemma1_bound,
    lemma2_bound,
    mc_penalty,
)
from .stein import BlockEnergies, block_energies, penalized_stein_filter, u_p, ure_filter
from .streams import MonteCarlo, RandomStream
from .validation import ValidationError

__version__ = "0.1.0"
