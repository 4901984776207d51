"""Directional Spearman footrule coefficients for multivariate copulas.

Exact values by closed form, quadrature or subset decomposition; rank-based
estimates from data; seeded simulation studies of the estimator.
"""

from .coefficients import (
    CoefficientValue,
    best_coefficient,
    direction_table,
    phi_by_method,
    phi_dir_decompose,
    phi_dir_quadrature,
    phi_footrule,
    phi_minus,
    phi_plus,
)
from .copulas import CopulaEvaluator, CopulaModel, reflect, survival_evaluator, validate_copula
from .dataset import Dataset, read_csv, write_csv
from .direction import Direction, all_directions
from .errors import DataError, DimensionError, ParameterError, QuadratureError, TieError
from .estimators import RankMatrix, phi_hat, phi_hat_all, ranks
from .experiments import ExperimentConfig, reproduce_table, run_experiment
from .quadrature import QuadratureSpec
from .sampling import RngStream, sample_model

__version__ = "0.1.0"

__all__ = [
    "CoefficientValue",
    "CopulaEvaluator",
    "CopulaModel",
    "DataError",
    "Dataset",
    "DimensionError",
    "Direction",
    "ExperimentConfig",
    "ParameterError",
    "QuadratureError",
    "QuadratureSpec",
    "RankMatrix",
    "RngStream",
    "TieError",
    "all_directions",
    "best_coefficient",
    "direction_table",
    "phi_by_method",
    "phi_dir_decompose",
    "phi_dir_quadrature",
    "phi_footrule",
    "phi_hat",
    "phi_hat_all",
    "phi_minus",
    "phi_plus",
    "ranks",
    "read_csv",
    "reflect",
    "reproduce_table",
    "run_experiment",
    "sample_model",
    "survival_evaluator",
    "validate_copula",
    "write_csv",
]
