import logging
from typing import Union

import numpy as np

from config import settings
from src.errors import DimensionMismatch, RecourseInfeasible
from src.lp import EQ, GE, LE, MAXIMIZE, LinearProgram, LpStatus, ProgramBuilder, solve_lp
from src.milp import MilpStatus, MixedIntegerProgram, SolverConfig, solve_milp
from .problem import Scenario, ScenarioSet, TwoStageProblem

logger = logging.getLogger(__name__)


def _exact_config() -> SolverConfig:
    return SolverConfig(
        gap_tol=0.0,
        node_limit=settings.node_limit,
        time_limit_s=settings.mip_time_limit_s,
        integrality_tol=settings.integrality_tol,
    )


def recourse_program(problem: TwoStageProblem, x: np.ndarray,
                     scenario: Scenario) -> Union[LinearProgram, MixedIntegerProgram]:
    """min q^T y  s.t.  W y (senses) h - T x  for a fixed first-stage decision"""
    x = np.asarray(x, dtype=float)
    if x.size != problem.first_stage.n:
        raise DimensionMismatch(f"x has length {x.size}, first stage has {problem.first_stage.n}")
    q, W, h, T = problem.scenario_data(scenario)
    tpl = problem.second_stage
    lp = LinearProgram(
        objective=q,
        matrix=W,
        senses=tpl.senses,
        rhs=h - T @ x,
        lower=tpl.lower,
        upper=tpl.upper,
    )
    if not tpl.integer_vars:
        return lp
    binaries = frozenset(j for j in tpl.integer_vars if tpl.lower[j] == 0.0 and tpl.upper[j] == 1.0)
    return MixedIntegerProgram(base=lp, integer_vars=tpl.integer_vars, binary_vars=binaries)


def evaluate_recourse(problem: TwoStageProblem, x: np.ndarray, scenario: Scenario) -> float:
    """Optimal second-stage cost Q(x, scenario)"""
    program = recourse_program(problem, x, scenario)
    if isinstance(program, LinearProgram):
        sol = solve_lp(program)
        if sol.status == LpStatus.OPTIMAL:
            return sol.objective
        status = sol.status.value
    else:
        sol = solve_milp(program, _exact_config())
        if sol.has_incumbent and sol.status in (MilpStatus.OPTIMAL, MilpStatus.FEASIBLE, MilpStatus.TIME_LIMIT):
            if sol.status != MilpStatus.OPTIMAL:
                logger.warning(f"Recourse MILP for scenario {scenario.scenario_id} stopped at {sol.status.value}")
            return sol.objective
        status = sol.status.value if sol.has_incumbent else f"{sol.status.value} without incumbent"
    logger.error(f"Recourse {status} for scenario {scenario.scenario_id} of {problem.name}")
    raise RecourseInfeasible(
        f"second stage is {status} for scenario {scenario.scenario_id}",
        x=x,
        scenario_id=scenario.scenario_id,
    )


def expected_recourse(problem: TwoStageProblem, x: np.ndarray, scenarios: ScenarioSet) -> float:
    """Probability-weighted sum of evaluate_recourse, accumulated in set order"""
    total = 0.0
    for scenario in scenarios:
        total += scenario.probability * evaluate_recourse(problem, x, scenario)
    return total


def recourse_dual_program(problem: TwoStageProblem, x: np.ndarray, scenario: Scenario) -> LinearProgram:
    """
    LP dual of a continuous recourse problem:

        max (r - W l)^T pi - (u - l)^T mu + q^T l
        s.t. W_j^T pi - mu_j <= q_j   (= q_j for free y_j),  mu >= 0

    with r = h - T x. pi is <= 0 on '<=' rows, >= 0 on '>=' rows and free on '=' rows.
    """
    tpl = problem.second_stage
    if tpl.integer_vars:
        raise ValueError("dual program is only defined for continuous recourse")
    q, W, h, T = problem.scenario_data(scenario)
    lower, upper = tpl.lower, tpl.upper
    if np.any(~np.isfinite(lower) & np.isfinite(upper)):
        raise ValueError("upper-bounded variables without a lower bound are not supported")

    finite_lower = np.where(np.isfinite(lower), lower, 0.0)
    r = h - T @ np.asarray(x, dtype=float) - W @ finite_lower
    builder = ProgramBuilder()
    builder.sense = MAXIMIZE
    builder.objective_offset = float(q @ finite_lower)
    pi = []
    for i, s in enumerate(tpl.senses):
        lo, hi = {LE: (-np.inf, 0.0), GE: (0.0, np.inf), EQ: (-np.inf, np.inf)}[s]
        pi.append(builder.add_variable(lo, hi, r[i], f"pi{i}"))
    mu = {}
    for j in range(tpl.n_y):
        if np.isfinite(upper[j]):
            mu[j] = builder.add_variable(0.0, np.inf, -(upper[j] - finite_lower[j]), f"mu{j}")

    Wc = W.tocsc()
    for j in range(tpl.n_y):
        start, end = Wc.indptr[j], Wc.indptr[j + 1]
        coeffs = {pi[i]: v for i, v in zip(Wc.indices[start:end], Wc.data[start:end])}
        if j in mu:
            coeffs[mu[j]] = -1.0
        sense = LE if np.isfinite(lower[j]) else EQ
        builder.add_constraint(coeffs, sense, q[j])
    return builder.build_lp()
