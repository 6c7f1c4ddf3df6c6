"""Data-driven feedback control for partially observed diffusions.

A particle filter tracks the conditional state distribution from noisy
indirect measurements; at every observation instant a stochastic
optimizer refines the planned control using gradients evaluated along
single simulated paths by a backward adjoint sweep.
"""

from .adjoint import AdjointPath, GridSolution1D, backward_grid_1d, \
    backward_mc_step, backward_single_path, gradient_along_path
from .errors import BackwardDivergence, ContractViolation, FiniteEscape, \
    SimulationDivergence
from .filtering import ParticleCloud, WeightedCloud, dump_clouds_csv, \
    estimate_mean, predict, resample, update_weights
from .optimize import FeedbackRunResult, FullSolutionParams, \
    OptimizerConfig, full_solution_gd, pf_sgd_update, run_feedback_loop, \
    solve_control_at_instant
from .problem import ControlProblem, ControlSchedule, PartialCheckReport, \
    TimeGrid, check_partials, evaluate_cost
from .sde import ObservationRecord, StatePath, euler_step, simulate_path, \
    synthesize_observation

__all__ = [
    "AdjointPath", "BackwardDivergence", "ContractViolation",
    "ControlProblem", "ControlSchedule", "FeedbackRunResult",
    "FiniteEscape", "FullSolutionParams", "GridSolution1D",
    "ObservationRecord", "OptimizerConfig", "ParticleCloud",
    "PartialCheckReport", "SimulationDivergence", "StatePath", "TimeGrid",
    "WeightedCloud", "backward_grid_1d", "backward_mc_step",
    "backward_single_path", "check_partials", "dump_clouds_csv",
    "estimate_mean", "euler_step", "evaluate_cost", "full_solution_gd",
    "gradient_along_path", "pf_sgd_update", "predict", "resample",
    "run_feedback_loop", "simulate_path", "solve_control_at_instant",
    "synthesize_observation", "update_weights",
]

__version__ = "0.1.0"
