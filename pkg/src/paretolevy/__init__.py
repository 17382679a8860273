"""Nonparametric inference on the jump dependence of bivariate Levy processes.

Simulate spectrally positive coupled-subordinator paths, estimate Levy tail
integrals and Pareto-Levy copulas from high-frequency increments (also under
irregular and asynchronous sampling), and verify the estimators' Gaussian
limits with a reproducible Monte Carlo harness.
"""

from .asymptotics import (
    LimitCovariance,
    empirical_cov,
    oracle_cov,
    relative_efficiency,
    tail_cov,
)
from .estimators import (
    AsynchronousTailIntegral,
    EmpiricalTailIntegral,
    quadrant_transform,
    scaled_deviation,
)
from .mc import ExperimentSpec, McReport, qq_data, run_experiment, table_specs
from .models import (
    ClaytonCopula,
    ComonotoneCopula,
    IndependenceCopula,
    ParetoLevyModel,
    StableTail,
    StepFunction,
    check_two_increasing,
    generalized_inverse,
    reciprocal,
)
from .schemes import (
    AsynchronousScheme,
    EquidistantScheme,
    IrregularScheme,
    diagnostics,
    overlap_pairs,
)
from .sim import (
    IncrementSeries,
    ProcessConfig,
    replication_rng,
    sample_path_increments,
    simulate_jumps,
    truncation_bias_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AsynchronousScheme",
    "AsynchronousTailIntegral",
    "ClaytonCopula",
    "ComonotoneCopula",
    "EmpiricalTailIntegral",
    "EquidistantScheme",
    "ExperimentSpec",
    "IncrementSeries",
    "IndependenceCopula",
    "IrregularScheme",
    "LimitCovariance",
    "McReport",
    "ParetoLevyModel",
    "ProcessConfig",
    "StableTail",
    "StepFunction",
    "check_two_increasing",
    "diagnostics",
    "empirical_cov",
    "generalized_inverse",
    "oracle_cov",
    "overlap_pairs",
    "qq_data",
    "quadrant_transform",
    "reciprocal",
    "relative_efficiency",
    "replication_rng",
    "run_experiment",
    "sample_path_increments",
    "scaled_deviation",
    "simulate_jumps",
    "table_specs",
    "tail_cov",
    "truncation_bias_probe",
]
