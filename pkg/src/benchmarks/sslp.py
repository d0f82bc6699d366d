"""
Stochastic server location (Ntaimo and Sen).

First stage:  x_j in {0, 1} places a server at site j, cost c_j ~ U{40..80}.
Second stage (client i, server j):
    y_ij in {0, 1}   client i served by j, revenue q_ij ~ U{0..25}
    y0_j >= 0        capacity overflow, penalty 1000 per unit
    sum_i d_ij y_ij - y0_j <= u x_j   (capacity rows, d = q)
    sum_j y_ij = h_i                  (h_i = 1 iff client i is present)
with u = 1.5 * sum(d) / n. Client presence is Bernoulli(availability).
"""

import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.spmodel import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem
from src.utils import named_rng

logger = logging.getLogger(__name__)

OVERFLOW_PENALTY = 1000.0
DEFAULT_AVAILABILITY = 0.5


def gen_sslp(n: int, m: int, seed: int, availability: float = DEFAULT_AVAILABILITY) -> TwoStageProblem:
    """n servers, m clients"""
    if n < 1 or m < 1:
        raise ValueError("SSLP needs at least one server and one client")
    rng = named_rng("SSLP", n, m, seed, "instance")

    cost = rng.integers(40, 81, size=n).astype(float)
    revenue = rng.integers(0, 26, size=(m, n)).astype(float)
    demand = revenue.copy()
    capacity = 1.5 * demand.sum() / n

    # y_ij at column i * n + j, overflow y0_j at m * n + j
    n_y = m * n + n
    q = np.concatenate([-revenue.reshape(-1), np.full(n, OVERFLOW_PENALTY)])
    rows, cols, vals = [], [], []
    for j in range(n):
        for i in range(m):
            if demand[i, j] != 0.0:
                rows.append(j)
                cols.append(i * n + j)
                vals.append(demand[i, j])
        rows.append(j)
        cols.append(m * n + j)
        vals.append(-1.0)
    for i in range(m):
        for j in range(n):
            rows.append(n + i)
            cols.append(i * n + j)
            vals.append(1.0)
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n + m, n_y))
    T = sp.csr_matrix((np.full(n, -capacity), (np.arange(n), np.arange(n))), shape=(n + m, n))
    h = np.concatenate([np.zeros(n), np.ones(m)])
    senses = ("<=",) * n + ("=",) * m
    upper = np.concatenate([np.ones(m * n), np.full(n, np.inf)])

    first = FirstStage(c=cost, lower=np.zeros(n), upper=np.ones(n), integer_vars=frozenset(range(n)))
    second = SecondStage(q=q, W=W, h=h, T=T, senses=senses, upper=upper,
                         integer_vars=frozenset(range(m * n)))
    metadata = {
        "family": "SSLP",
        "n": n,
        "m": m,
        "seed": seed,
        "availability": availability,
        "capacity": float(capacity),
        "availability_distribution": f"independent Bernoulli({availability}) per client",
    }
    logger.info(f"Generated SSLP_{n}_{m} (seed {seed}): server capacity {capacity:.1f}")
    return TwoStageProblem(name=f"SSLP_{n}_{m}", first_stage=first, second_stage=second, metadata=metadata)


def sslp_scenario(problem: TwoStageProblem, scenario_id: str, mask: np.ndarray, probability: float) -> Scenario:
    n = problem.metadata["n"]
    mask = np.asarray(mask, dtype=float)
    return Scenario(scenario_id=scenario_id, probability=probability, feature_vector=mask,
                    h=np.concatenate([np.zeros(n), mask]))


def sslp_scenarios(problem: TwoStageProblem, count: int, seed: int,
                   set_id: Optional[str] = None) -> ScenarioSet:
    meta = problem.metadata
    rng = named_rng("SSLP", meta["n"], meta["m"], meta["seed"], seed, "scenarios")
    scenarios = []
    for k in range(count):
        mask = (rng.uniform(size=meta["m"]) < meta["availability"]).astype(float)
        scenarios.append(sslp_scenario(problem, f"s{k}", mask, 1.0 / count))
    return ScenarioSet.uniform(set_id or f"{problem.name}_{count}_seed{seed}", scenarios, problem.name,
                               {"seed": seed, "count": count})
