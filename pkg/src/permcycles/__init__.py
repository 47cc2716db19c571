"""Exact, Monte Carlo and asymptotic statistics of random permutations with
cycle weights w_j(N) = theta_j + N * kappa_j."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DomainError,
    ModelParseError,
    ModelSupportError,
    PermCyclesError,
    SizeLimitError,
    UnsupportedRegimeError,
    ValidationFailure,
)
from .weights import (
    GenFnProfile,
    SequenceRule,
    WeightModel,
    constant_model,
    giant_cycle_model,
    load_model,
    polylog_model,
    weight,
)
from .series import SeriesTable, TnDistribution, build_table, log_partition, tn_pmf
from .exact_stats import (
    expected_cycle_counts,
    expected_long_fraction,
    factorial_moment,
    joint_l_pmf,
    l1_pmf,
)
from .sampler import CycleType, McSummary, run_monte_carlo, sample_cycle_type, sample_lengths
from .asymptotics import RegimeReport, asymptotic_log_HN, classify, solve_r_v

__all__ = [name for name in dir() if not name.startswith("_")]
