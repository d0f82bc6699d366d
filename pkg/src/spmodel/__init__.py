"""
Two-stage stochastic programs: problem and scenario types, the extensive form,
exact recourse evaluation, first-stage sampling and convexity probes.
"""

from .problem import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem
from .extensive_form import build_extensive_form, split_solution
from .recourse import evaluate_recourse, expected_recourse, recourse_dual_program, recourse_program
from .sampling import FirstStageSampler, sample_first_stage
from .convexity import ConvexityReport, probe_convexity
from .serialization import (
    load_problem,
    load_scenarios,
    problem_from_dict,
    problem_to_dict,
    save_problem,
    save_scenarios,
    scenario_set_from_dict,
    scenario_set_to_dict,
)

__all__ = [
    "FirstStage",
    "Scenario",
    "ScenarioSet",
    "SecondStage",
    "TwoStageProblem",
    "build_extensive_form",
    "split_solution",
    "evaluate_recourse",
    "expected_recourse",
    "recourse_dual_program",
    "recourse_program",
    "FirstStageSampler",
    "sample_first_stage",
    "ConvexityReport",
    "probe_convexity",
    "load_problem",
    "load_scenarios",
    "problem_from_dict",
    "problem_to_dict",
    "save_problem",
    "save_scenarios",
    "scenario_set_from_dict",
    "scenario_set_to_dict",
]
