"""Level-set wildfire spread simulation and spread-parameter estimation."""
from .estimation import (DEFAULT_P_MAX, DEFAULT_P_MIN, CostObjective, EstimationReport,
                         FireSpreadEstimator, estimate, forecast,
                         generate_synthetic_measurements)
from .grid import GridSpec, Wind
from .metrics import cost_J, metric_report, relative_error, similarity_indexes
from .patternsearch import SearchConfig, minimize
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .solver import FrontSeries, NumericalError, SolverConfig, simulate
from .spread import ParamVector, rate_of_spread, speed_field

__version__ = "0.1.0"

__all__ = [
    "CostObjective", "DEFAULT_P_MAX", "DEFAULT_P_MIN", "EstimationReport",
    "FireSpreadEstimator", "FrontSeries", "GridSpec", "NumericalError", "ParamVector",
    "Scenario", "ScenarioError", "SearchConfig", "SolverConfig", "Wind", "cost_J", "estimate",
    "forecast", "generate_synthetic_measurements", "load_scenario", "metric_report",
    "minimize", "parse_scenario", "rate_of_spread", "relative_error", "similarity_indexes",
    "simulate", "speed_field",
]
