"""
Small builders shared by several test modules.
"""

import numpy as np

from src.lp import LE, LinearProgram


def random_bounded_lp(seed: int, n_vars: int = 5, n_rows: int = 4) -> LinearProgram:
    """Random <= rows with positive rhs over a box, so x = 0 is feasible and the region is bounded"""
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1.0, 1.0, size=(n_rows, n_vars))
    rhs = rng.uniform(1.0, 3.0, size=n_rows)
    rows = [({j: A[i, j] for j in range(n_vars)}, LE, rhs[i]) for i in range(n_rows)]
    c = rng.uniform(-1.0, 1.0, size=n_vars)
    return LinearProgram.from_rows(c, rows, lower=[0.0] * n_vars, upper=[2.0] * n_vars)


def toy_continuous_problem(h=(5.0, 6.0)):
    """
    min x1 + x2 + E[ min 3 y1 + 4 y2 : y1 + y2 >= h1 - x1, y1 + 2 y2 >= h2 - x2, y >= 0 ],  x in [0, 3]^2.
    Its recourse dual {pi >= 0, pi1 + pi2 <= 3, pi1 + 2 pi2 <= 4} is bounded with vertices
    (0, 0), (3, 0), (0, 2) and (2, 1).
    """
    from src.spmodel import FirstStage, SecondStage, TwoStageProblem

    first = FirstStage(c=[1.0, 1.0], lower=[0.0, 0.0], upper=[3.0, 3.0])
    second = SecondStage(q=[3.0, 4.0], W=np.array([[1.0, 1.0], [1.0, 2.0]]), h=list(h), T=np.eye(2),
                         senses=(">=", ">="))
    return TwoStageProblem(name="TOY", first_stage=first, second_stage=second, metadata={"family": "TOY"})


def toy_scenarios(problem, rhs_values, set_id: str = "toy"):
    from src.spmodel import Scenario, ScenarioSet

    scenarios = [Scenario(f"s{k}", 1.0 / len(rhs_values), feature_vector=h, h=h) for k, h in enumerate(rhs_values)]
    return ScenarioSet.uniform(set_id, scenarios, problem.name)


def synthetic_dataset(fn, n: int, x_dim: int, seed: int = 0, pool_ids=("s0",)):
    """Records with x uniform on [0, 1]^x_dim and label fn(x); every record points at pool_ids"""
    from src.datagen import DataRecord, SurrogateDataset

    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        x = rng.uniform(0.0, 1.0, size=x_dim)
        records.append(DataRecord(x=x, scenario_ids=tuple(pool_ids), label=float(fn(x))))
    return SurrogateDataset(records=records, provenance={"synthetic": True})


def scenario_set_from_features(features, set_id: str = "features"):
    from src.spmodel import Scenario, ScenarioSet

    return ScenarioSet.uniform(set_id, [Scenario(f"s{k}", 1.0, f) for k, f in enumerate(features)])
