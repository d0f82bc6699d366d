import logging

import numpy as np
import scipy.sparse as sp

from src.errors import DimensionMismatch
from src.lp import LinearProgram
from src.milp import MixedIntegerProgram
from .problem import PROBABILITY_TOL, ScenarioSet, TwoStageProblem

logger = logging.getLogger(__name__)


def build_extensive_form(problem: TwoStageProblem, scenarios: ScenarioSet) -> MixedIntegerProgram:
    """
    Deterministic equivalent over a finite scenario set. Columns are laid out as
    [x, y_1, ..., y_S]; rows as [first-stage rows, linking rows of scenario 1, ...].
    """
    total = float(scenarios.probabilities.sum())
    if abs(total - 1.0) > PROBABILITY_TOL:
        raise ValueError(f"scenario probabilities sum to {total}, expected 1")

    fs = problem.first_stage
    tpl = problem.second_stage
    n, n_y = fs.n, tpl.n_y
    S = len(scenarios)

    objective = [fs.c]
    lower = [fs.lower]
    upper = [fs.upper]
    rhs = [fs.b]
    senses = list(fs.senses)
    T_blocks, W_blocks = [], []
    integers = sorted(fs.integer_vars)

    for k, scenario in enumerate(scenarios):
        try:
            q, W, h, T = problem.scenario_data(scenario)
        except DimensionMismatch:
            logger.error(f"Scenario {scenario.scenario_id} does not fit problem {problem.name}")
            raise
        T_blocks.append(T)
        W_blocks.append(W)
        objective.append(scenario.probability * q)
        lower.append(tpl.lower)
        upper.append(tpl.upper)
        rhs.append(h)
        senses.extend(tpl.senses)
        offset = n + k * n_y
        integers.extend(offset + j for j in sorted(tpl.integer_vars))

    linking = sp.hstack([sp.vstack(T_blocks), sp.block_diag(W_blocks)], format="csr")
    if fs.n_rows:
        first_rows = sp.hstack([fs.A, sp.csr_matrix((fs.n_rows, S * n_y))], format="csr")
        matrix = sp.vstack([first_rows, linking], format="csr")
    else:
        matrix = linking

    base = LinearProgram(
        objective=np.concatenate(objective),
        matrix=matrix,
        senses=tuple(senses),
        rhs=np.concatenate(rhs),
        lower=np.concatenate(lower),
        upper=np.concatenate(upper),
        var_names=tuple(
            [f"x{j}" for j in range(n)]
            + [f"y{k}_{j}" for k in range(S) for j in range(n_y)]
        ),
    )
    integer_vars = frozenset(integers)
    binary_vars = frozenset(j for j in integer_vars if base.lower[j] == 0.0 and base.upper[j] == 1.0)
    logger.info(
        f"Extensive form for {problem.name} with {S} scenarios: "
        f"{base.n_vars} variables ({len(integer_vars)} integer), {base.n_rows} rows"
    )
    return MixedIntegerProgram(base=base, integer_vars=integer_vars, binary_vars=binary_vars)


def split_solution(problem: TwoStageProblem, scenarios: ScenarioSet, x_full: np.ndarray):
    """Return (x, [y_1, ..., y_S]) from an extensive-form solution vector"""
    n, n_y = problem.first_stage.n, problem.second_stage.n_y
    x = np.asarray(x_full[:n], dtype=float)
    ys = [np.asarray(x_full[n + k * n_y: n + (k + 1) * n_y]) for k in range(len(scenarios))]
    return x, ys
