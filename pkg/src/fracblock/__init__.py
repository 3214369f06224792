"""Block-by-block time stepping for Caputo fractional ODEs of order 0 < nu <= 1."""

from .caputo import Grid, GridMismatchError, corrected_discrete_caputo, discrete_caputo
from .corrections import IllConditionedError, StartingWeights, starting_weights
from .problems import PROBLEM_IDS, make_problem, registry
from .solver import (
    NewtonConfig,
    NonConvergenceError,
    Problem,
    SingularJacobianError,
    StepSizeWarning,
    Trajectory,
    advance_step,
    solve,
    solve_corrected,
    solve_initial_pair,
)
from .special import gamma_fn, log_gamma, log_mittag_leffler, mittag_leffler, monomial_caputo
from .study import ConvergenceReport, StudySpec, emit_report, parse_csv, run_study
from .weights import alpha0, first_step_weights, history_row, row_weights

__all__ = [
    "Grid",
    "GridMismatchError",
    "discrete_caputo",
    "corrected_discrete_caputo",
    "IllConditionedError",
    "StartingWeights",
    "starting_weights",
    "PROBLEM_IDS",
    "make_problem",
    "registry",
    "NewtonConfig",
    "NonConvergenceError",
    "Problem",
    "SingularJacobianError",
    "StepSizeWarning",
    "Trajectory",
    "advance_step",
    "solve",
    "solve_corrected",
    "solve_initial_pair",
    "gamma_fn",
    "log_gamma",
    "log_mittag_leffler",
    "mittag_leffler",
    "monomial_caputo",
    "ConvergenceReport",
    "StudySpec",
    "emit_report",
    "parse_csv",
    "run_study",
    "alpha0",
    "first_step_weights",
    "history_row",
    "row_weights",
]
