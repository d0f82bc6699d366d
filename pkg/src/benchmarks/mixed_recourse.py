"""
Single-binary mixed-integer recourse that breaks convexity in x.

    Q(x, h) = min  q_int * y_int + q_cont * y_cont
              s.t. y_cont + M * y_int >= h - T x
                   y_cont + U * y_int <= U
                   y_int in {0, 1},  y_cont >= 0

Switching y_int on forces y_cont = 0 and is feasible only when h - T x <= M,
so Q drops from q_cont * (h - T x) to q_int once T x crosses h - M.
"""

from typing import Optional, Sequence

import numpy as np

from src.spmodel import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem


def gen_mixed_recourse_example(big_m: float = 3.0, q_int: float = 1.0, q_cont: float = 1.0,
                               technology: float = 1.0, h_values: Sequence[float] = (10.0,),
                               x_upper: float = 10.0, cost: float = 0.0) -> TwoStageProblem:
    h_values = [float(h) for h in h_values]
    cap = max(h_values) + abs(technology) * x_upper
    first = FirstStage(c=[cost], lower=[0.0], upper=[x_upper])
    second = SecondStage(
        q=[q_int, q_cont],
        W=np.array([[big_m, 1.0], [cap, 1.0]]),
        h=[h_values[0], cap],
        T=np.array([[technology], [0.0]]),
        senses=(">=", "<="),
        lower=[0.0, 0.0],
        upper=[1.0, np.inf],
        integer_vars=frozenset({0}),
    )
    metadata = {
        "family": "MIXED",
        "big_m": big_m,
        "q_int": q_int,
        "q_cont": q_cont,
        "technology": technology,
        "h_values": h_values,
        "cap": cap,
    }
    return TwoStageProblem(name="MIXED_RECOURSE", first_stage=first, second_stage=second, metadata=metadata)


def mixed_recourse_scenarios(problem: TwoStageProblem, set_id: Optional[str] = None) -> ScenarioSet:
    cap = problem.metadata["cap"]
    values = problem.metadata["h_values"]
    scenarios = [
        Scenario(scenario_id=f"s{k}", probability=1.0 / len(values), feature_vector=[h], h=[h, cap])
        for k, h in enumerate(values)
    ]
    return ScenarioSet.uniform(set_id or f"{problem.name}_{len(values)}", scenarios, problem.name)
