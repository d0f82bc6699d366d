"""
Investment problem of Schultz, Stougie and van der Vlerk, written as minimization.

    min  -1.5 x1 - 4 x2 + E[Q(x, xi)],   x in [0, 5]^2
    Q(x, xi) = min -16 y1 - 19 y2 - 23 y3 - 28 y4
               s.t. 2 y1 + 3 y2 + 4 y3 + 5 y4 <= xi1 - (T x)_1
                    6 y1 +   y2 + 3 y3 + 2 y4 <= xi2 - (T x)_2

Variants: y binary (B) or integer in [0, 5] (I); T identity (E) or
[[2/3, 1/3], [1/3, 2/3]] (H). xi is uniform on [5, 15]^2, or a k x k grid.
Coefficients come from the checked-in data file.
"""

import itertools
import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from src.spmodel import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem
from src.utils import named_rng

logger = logging.getLogger(__name__)

DATA_FILE = Path(__file__).parent / "data" / "invp_schultz.json"


@lru_cache(maxsize=1)
def load_invp_data() -> Dict[str, Any]:
    return json.loads(DATA_FILE.read_text())


def gen_invp(second_stage_kind: str, technology: str, seed: int = 0) -> TwoStageProblem:
    if second_stage_kind not in ("B", "I"):
        raise ValueError(f"INVP second-stage kind must be 'B' or 'I', got '{second_stage_kind}'")
    if technology not in ("E", "H"):
        raise ValueError(f"INVP technology must be 'E' or 'H', got '{technology}'")
    data = load_invp_data()
    fs, ss = data["first_stage"], data["second_stage"]

    y_upper = 1.0 if second_stage_kind == "B" else float(ss["integer_upper"])
    n_y = len(ss["q"])
    first = FirstStage(c=fs["c"], lower=fs["lower"], upper=fs["upper"])
    second = SecondStage(
        q=ss["q"],
        W=np.array(ss["W"]),
        h=np.full(len(ss["W"]), data["rhs_range"][0]),
        T=np.array(data["technology"][technology]),
        senses=tuple(ss["senses"]),
        lower=np.zeros(n_y),
        upper=np.full(n_y, y_upper),
        integer_vars=frozenset(range(n_y)),
    )
    metadata = {
        "family": "INVP",
        "second_stage_kind": second_stage_kind,
        "technology": technology,
        "seed": seed,
        "rhs_range": data["rhs_range"],
        "source": data["source"],
    }
    return TwoStageProblem(name=f"INVP_{second_stage_kind}_{technology}", first_stage=first,
                           second_stage=second, metadata=metadata)


def invp_scenario(scenario_id: str, xi: np.ndarray, probability: float) -> Scenario:
    xi = np.asarray(xi, dtype=float)
    return Scenario(scenario_id=scenario_id, probability=probability, feature_vector=xi, h=xi)


def invp_scenarios(problem: TwoStageProblem, count: int, seed: int, grid: bool = False,
                   set_id: Optional[str] = None) -> ScenarioSet:
    """Uniform draws on [5, 15]^2, or the k x k grid of equally spaced points when grid=True (count = k^2)"""
    lo, hi = problem.metadata["rhs_range"]
    if grid:
        k = math.isqrt(count)
        if k * k != count:
            raise ValueError(f"grid scenario count must be a perfect square, got {count}")
        axis = np.linspace(lo, hi, k) if k > 1 else np.array([(lo + hi) / 2.0])
        points = [np.array(p) for p in itertools.product(axis, axis)]
    else:
        meta = problem.metadata
        rng = named_rng("INVP", meta["second_stage_kind"], meta["technology"], meta["seed"], seed, "scenarios")
        points = [rng.uniform(lo, hi, size=2) for _ in range(count)]
    scenarios = [invp_scenario(f"s{k}", xi, 1.0 / count) for k, xi in enumerate(points)]
    tag = "grid" if grid else f"seed{seed}"
    return ScenarioSet.uniform(set_id or f"{problem.name}_{count}_{tag}", scenarios, problem.name,
                               {"seed": seed, "count": count, "grid": grid})
