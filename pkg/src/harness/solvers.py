"""
The three solution methods: the extensive form, and the two surrogate
reformulations. Each returns a MethodResult with the first-stage decision.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config import settings
from src.errors import NoIncumbentAtLimit
from src.lp import LinearProgram, LpStatus, solve_lp
from src.milp import MilpStatus, MixedIntegerProgram, NodeRecord, SolverConfig, solve_milp
from src.nn import KIND_ICNN, SurrogateModel
from src.embed import EmbeddedModel, embed_model, scenario_encoding
from src.spmodel import ScenarioSet, TwoStageProblem, build_extensive_form

logger = logging.getLogger(__name__)

# Fixed-parameter settings of a commercial solver that have no counterpart in the
# simplex / best-bound branch and bound used here; kept in every report.
UNMAPPED_SOLVER_PARAMS = {"NodeMethod": 1, "Cuts": 1, "MIPFocus": 2}
MAPPED_SOLVER_PARAMS = {"TimeLimit": "time_limit_s", "Threads": 1, "Presolve": 0, "Heuristics": 0}


@dataclass
class MethodResult:
    method: str
    x: Optional[np.ndarray]
    approx_objective: float
    status: str
    wall_time_s: float
    size_summary: Dict[str, Any] = field(default_factory=dict)
    node_log: List[NodeRecord] = field(default_factory=list)


def program_size(program: Union[LinearProgram, MixedIntegerProgram]) -> Dict[str, int]:
    if isinstance(program, MixedIntegerProgram):
        lp, n_int, n_bin = program.base, len(program.integer_vars), len(program.binary_vars)
    else:
        lp, n_int, n_bin = program, 0, 0
    return {"n_continuous": lp.n_vars - n_int, "n_integer": n_int, "n_binary": n_bin, "n_rows": lp.n_rows}


def _milp_config(time_limit_s: float, node_log_path: Optional[str] = None) -> SolverConfig:
    return SolverConfig(gap_tol=settings.mip_gap_tol, node_limit=settings.node_limit, time_limit_s=time_limit_s,
                        integrality_tol=settings.integrality_tol, node_log_path=node_log_path)


def solve_program(program: Union[LinearProgram, MixedIntegerProgram], time_limit_s: float,
                  node_log_path: Optional[str] = None):
    """Returns (x, objective, status, seconds, node_log); x is None when nothing feasible was found"""
    if isinstance(program, MixedIntegerProgram) and program.integer_vars:
        try:
            sol = solve_milp(program, _milp_config(time_limit_s, node_log_path))
        except NoIncumbentAtLimit as e:
            logger.warning(f"No incumbent after {e.node_count} nodes: {e}")
            return None, math.nan, "no_incumbent", time_limit_s, []
        if not sol.has_incumbent:
            return None, math.nan, sol.status.value, sol.wall_time_s, sol.node_log
        status = sol.status.value
        if sol.status == MilpStatus.TIME_LIMIT:
            logger.warning(f"Time limit {time_limit_s}s reached; reporting the incumbent (gap {sol.gap:.3g})")
        return sol.incumbent, sol.objective, status, sol.wall_time_s, sol.node_log
    lp = program.base if isinstance(program, MixedIntegerProgram) else program
    start = time.perf_counter()
    sol = solve_lp(lp)
    elapsed = time.perf_counter() - start
    if sol.status != LpStatus.OPTIMAL:
        return None, math.nan, sol.status.value, elapsed, []
    return sol.primal, sol.objective, "optimal", elapsed, []


def solve_extensive_form(problem: TwoStageProblem, scenarios: ScenarioSet, time_limit_s: Optional[float] = None,
                         node_log_path: Optional[str] = None) -> MethodResult:
    time_limit_s = settings.ef_time_limit_s if time_limit_s is None else time_limit_s
    ef = build_extensive_form(problem, scenarios)
    values, objective, status, elapsed, node_log = solve_program(ef, time_limit_s, node_log_path)
    x = None if values is None else np.asarray(values[:problem.n_first], dtype=float)
    logger.info(f"EF {problem.name} s={len(scenarios)}: {status}, objective {objective:.6g}, {elapsed:.3f}s")
    return MethodResult("EF", x, objective, status, elapsed, program_size(ef), node_log)


def solve_embedded(embedded: EmbeddedModel, method: str, time_limit_s: float) -> MethodResult:
    values, objective, status, elapsed, node_log = solve_program(embedded.program, time_limit_s)
    x = None if values is None else embedded.first_stage_solution(values)
    summary = embedded.size_summary.to_dict()
    logger.info(f"{method} embedding: {status}, approx objective {objective:.6g}, {elapsed:.3f}s")
    return MethodResult(method, x, objective, status, elapsed, summary, node_log)


def solve_surrogate(model: SurrogateModel, problem: TwoStageProblem, scenarios: ScenarioSet,
                    time_limit_s: Optional[float] = None, xi: Optional[np.ndarray] = None) -> MethodResult:
    """Encode once (not timed), embed, and solve the reformulation"""
    time_limit_s = settings.ef_time_limit_s if time_limit_s is None else time_limit_s
    if xi is None:
        xi = scenario_encoding(model, scenarios)
    embedded = embed_model(model, problem.first_stage, xi=xi)
    method = "ICNN" if model.kind == KIND_ICNN else "NN"
    return solve_embedded(embedded, method, time_limit_s)


def time_to_match(node_log: List[NodeRecord], target: float, rel_tol: float = 1e-5) -> Optional[float]:
    """First elapsed time at which a minimizing search held an incumbent at least as good as target"""
    threshold = target + rel_tol * max(1.0, abs(target))
    for record in node_log:
        if math.isfinite(record.incumbent) and record.incumbent <= threshold:
            return record.time_s
    return None
