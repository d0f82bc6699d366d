"""
Experiment harness: the three solution methods, result reports and the
config-driven pipeline behind the command line.
"""

from .report import (BASELINE_METHOD, METHODS, SolveReport, apply_gaps, check_summary, compute_gap,
                     evaluate_true_objective, load_reports, reports_frame, round_first_stage, summary_statistics,
                     write_reports)
from .solvers import (MAPPED_SOLVER_PARAMS, UNMAPPED_SOLVER_PARAMS, MethodResult, program_size, solve_embedded,
                      solve_extensive_form, solve_program, solve_surrogate, time_to_match)
from .pipeline import (DataConfig, ExperimentPipeline, InstanceConfig, PipelineConfig, ScenarioConfig,
                       TrainingConfig, git_commit, run_pipeline)

__all__ = [
    "BASELINE_METHOD",
    "METHODS",
    "SolveReport",
    "apply_gaps",
    "check_summary",
    "compute_gap",
    "evaluate_true_objective",
    "load_reports",
    "reports_frame",
    "round_first_stage",
    "summary_statistics",
    "write_reports",
    "MAPPED_SOLVER_PARAMS",
    "UNMAPPED_SOLVER_PARAMS",
    "MethodResult",
    "program_size",
    "solve_embedded",
    "solve_extensive_form",
    "solve_program",
    "solve_surrogate",
    "time_to_match",
    "DataConfig",
    "ExperimentPipeline",
    "InstanceConfig",
    "PipelineConfig",
    "ScenarioConfig",
    "TrainingConfig",
    "git_commit",
    "run_pipeline",
]
