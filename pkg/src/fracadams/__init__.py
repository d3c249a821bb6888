"""Fractional Adams predictor-corrector solvers for Caputo and uncertain fractional equations."""

__version__ = "0.1.0"

from .errors import FracAdamsError
from .lagrange import eval_basis, split_lagrange
from .moments import WeightSet, interval_weights, moment, moments
from .solver import (
    CaputoProblem,
    SolverConfig,
    StepTable,
    TimeGrid,
    Trajectory,
    build_table,
    prepare,
    solve,
    truncation_bound,
)
from .uncertain import (
    AlphaGrid,
    AlphaSurface,
    UncertainProblem,
    alpha_path_problem,
    liu_inverse_std,
    sweep,
)
from .analytics import (
    DistributionCurve,
    MonotoneMap,
    error_study,
    expected_value,
    extreme_value,
    fht_curve,
    fht_distribution,
)

__all__ = [
    "AlphaGrid", "AlphaSurface", "CaputoProblem", "DistributionCurve", "FracAdamsError",
    "MonotoneMap", "SolverConfig", "StepTable", "TimeGrid", "Trajectory", "UncertainProblem",
    "WeightSet", "alpha_path_problem", "build_table", "error_study", "eval_basis",
    "expected_value", "extreme_value", "fht_curve", "fht_distribution", "interval_weights",
    "liu_inverse_std", "moment", "moments", "prepare", "solve", "split_lagrange", "sweep",
    "truncation_bound",
]
