"""
Capacitated facility location with stochastic demand.

Deterministic data follow the Cornuejols, Sridharan and Thizy style of random
instances: sites and customers uniform in the unit square, base demand
U{5..35}, capacities U[10, 160] rescaled to a fixed multiple of total demand,
fixed cost U[0, 90] + U[100, 110] * sqrt(capacity), unit transport cost
10 * distance. Uncovered demand is bought at a per-unit penalty, which gives
relatively complete recourse.

First stage:  x_j in {0, 1}  (open facility j), cost f_j.
Second stage (customer i, facility j):
    y_ij >= 0  units shipped, cost t_ij
    u_i  >= 0  shortfall, cost penalty
    sum_j y_ij + u_i = d_i           (demand rows)
    sum_i y_ij - s_j x_j <= 0        (capacity rows)
"""

import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.spmodel import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem
from src.utils import named_rng

logger = logging.getLogger(__name__)

DEFAULT_CAPACITY_RATIO = 3.0
DEFAULT_PENALTY = 30.0


def gen_cflp(n: int, m: int, seed: int, capacity_ratio: float = DEFAULT_CAPACITY_RATIO,
             penalty: float = DEFAULT_PENALTY) -> TwoStageProblem:
    """n facilities, m customers"""
    if n < 1 or m < 1:
        raise ValueError("CFLP needs at least one facility and one customer")
    rng = named_rng("CFLP", n, m, seed, "instance")

    facilities = rng.uniform(0.0, 1.0, size=(n, 2))
    customers = rng.uniform(0.0, 1.0, size=(m, 2))
    base_demand = rng.integers(5, 36, size=m).astype(float)
    capacity = rng.uniform(10.0, 160.0, size=n)
    capacity *= capacity_ratio * base_demand.sum() / capacity.sum()
    fixed_cost = rng.uniform(0.0, 90.0, size=n) + rng.uniform(100.0, 110.0, size=n) * np.sqrt(capacity)
    distance = np.linalg.norm(customers[:, None, :] - facilities[None, :, :], axis=2)
    transport = 10.0 * distance

    n_y = m * n + m
    # y_ij at column i * n + j, shortfall u_i at m * n + i
    q = np.concatenate([transport.reshape(-1), np.full(m, penalty)])

    rows, cols, vals = [], [], []
    for i in range(m):
        for j in range(n):
            rows.append(i)
            cols.append(i * n + j)
            vals.append(1.0)
        rows.append(i)
        cols.append(m * n + i)
        vals.append(1.0)
    for j in range(n):
        for i in range(m):
            rows.append(m + j)
            cols.append(i * n + j)
            vals.append(1.0)
    W = sp.csr_matrix((vals, (rows, cols)), shape=(m + n, n_y))
    T = sp.csr_matrix((-capacity, (m + np.arange(n), np.arange(n))), shape=(m + n, n))
    h = np.concatenate([base_demand, np.zeros(n)])
    senses = ("=",) * m + ("<=",) * n

    first = FirstStage(
        c=fixed_cost,
        lower=np.zeros(n),
        upper=np.ones(n),
        integer_vars=frozenset(range(n)),
    )
    second = SecondStage(q=q, W=W, h=h, T=T, senses=senses)
    metadata = {
        "family": "CFLP",
        "n": n,
        "m": m,
        "seed": seed,
        "base_demand": base_demand.tolist(),
        "capacity": capacity.tolist(),
        "penalty": penalty,
        "capacity_ratio": capacity_ratio,
        "demand_distribution": "integer uniform on [0.5 d, 1.5 d] per customer",
    }
    logger.info(f"Generated CFLP_{n}_{m} (seed {seed}): total capacity {capacity.sum():.1f}")
    return TwoStageProblem(name=f"CFLP_{n}_{m}", first_stage=first, second_stage=second, metadata=metadata)


def cflp_scenario(problem: TwoStageProblem, scenario_id: str, demand: np.ndarray,
                  probability: float) -> Scenario:
    n = problem.metadata["n"]
    h = np.concatenate([np.asarray(demand, dtype=float), np.zeros(n)])
    return Scenario(scenario_id=scenario_id, probability=probability, feature_vector=demand, h=h)


def cflp_scenarios(problem: TwoStageProblem, count: int, seed: int,
                   set_id: Optional[str] = None) -> ScenarioSet:
    meta = problem.metadata
    rng = named_rng("CFLP", meta["n"], meta["m"], meta["seed"], seed, "scenarios")
    base = np.asarray(meta["base_demand"])
    low = np.ceil(0.5 * base).astype(np.int64)
    high = np.floor(1.5 * base).astype(np.int64)
    scenarios = []
    for k in range(count):
        demand = rng.integers(low, high + 1).astype(float)
        scenarios.append(cflp_scenario(problem, f"s{k}", demand, 1.0 / count))
    return ScenarioSet.uniform(set_id or f"{problem.name}_{count}_seed{seed}", scenarios, problem.name,
                               {"seed": seed, "count": count})
