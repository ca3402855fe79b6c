"""Exact-arithmetic laboratory for integer skew products over cyclic extensions of rotations."""

__version__ = "0.1.0"

from skewlab.rational import (
    ContinuedFraction,
    DomainError,
    HorizonError,
    cf_from_rational,
    convergents,
    dist_nearest_int,
    quality_bound_check,
)
from skewlab.dynamics import (
    Indicator,
    LevelFunction,
    Point,
    SkewState,
    StepFunction,
    SystemConfig,
    base_step,
    ergodic_sum,
    periodic_step,
    skew_step,
    variation,
)
from skewlab.circle import CircleIntervalSet, ContractError, build_A_n, discontinuities
from skewlab.config import ConfigError, load_config
from skewlab.reference import reference_config, running_example

__all__ = [
    "CircleIntervalSet",
    "ConfigError",
    "ContinuedFraction",
    "ContractError",
    "DomainError",
    "HorizonError",
    "Indicator",
    "LevelFunction",
    "Point",
    "SkewState",
    "StepFunction",
    "SystemConfig",
    "base_step",
    "build_A_n",
    "cf_from_rational",
    "convergents",
    "discontinuities",
    "dist_nearest_int",
    "ergodic_sum",
    "load_config",
    "periodic_step",
    "quality_bound_check",
    "reference_config",
    "running_example",
    "skew_step",
    "variation",
]
