"""Estimation of limiting extreme-value copulas and Pickands dependence
functions from block maxima of multivariate stationary time series, with
exactly solvable simulators and a Monte Carlo harness."""

from blockmax._errors import ConfigError, NumericError
from blockmax.block_empirics import (
    BlockMaxima,
    PseudoObs,
    empirical_copula,
    extract_block_maxima,
    pseudo_observations,
)
from blockmax.copulas import (
    CopulaSpec,
    ev_attractor,
    sample,
    tail_dependence,
    tdc_to_param,
)
from blockmax.monte_carlo import ExperimentConfig, run_experiment, table1
from blockmax.moving_maxima import MovingMaxConfig, two_lag_design
from blockmax.pickands import (
    EstimatorConfig,
    PickandsEstimate,
    estimate_pickands,
    shape_check,
)
from blockmax.random_repetition import RepetitionConfig

__all__ = [
    "ConfigError",
    "NumericError",
    "BlockMaxima",
    "PseudoObs",
    "empirical_copula",
    "extract_block_maxima",
    "pseudo_observations",
    "CopulaSpec",
    "ev_attractor",
    "sample",
    "tail_dependence",
    "tdc_to_param",
    "ExperimentConfig",
    "run_experiment",
    "table1",
    "MovingMaxConfig",
    "two_lag_design",
    "EstimatorConfig",
    "PickandsEstimate",
    "estimate_pickands",
    "shape_check",
    "RepetitionConfig",
]

__version__ = "0.1.0"
