"""
JSON instance files. Sparse matrices are stored as explicit triplets,
infinite bounds as the strings "inf" / "-inf". Scenario sets live in their own
files and point back at their problem by name.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import scipy.sparse as sp

from src.errors import FormatError
from .problem import FirstStage, Scenario, ScenarioSet, SecondStage, TwoStageProblem

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def _float(v: float) -> Union[float, str]:
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return float(v)


def _floats(values) -> List[Union[float, str]]:
    return [_float(v) for v in np.asarray(values, dtype=float)]


def _parse_floats(values) -> np.ndarray:
    return np.array([float(v) for v in values], dtype=float)


def matrix_to_triplets(matrix: sp.spmatrix) -> Dict[str, Any]:
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    return {
        "shape": [int(coo.shape[0]), int(coo.shape[1])],
        "rows": coo.row[order].astype(int).tolist(),
        "cols": coo.col[order].astype(int).tolist(),
        "vals": coo.data[order].astype(float).tolist(),
    }


def matrix_from_triplets(data: Dict[str, Any]) -> sp.csr_matrix:
    shape = tuple(data["shape"])
    return sp.csr_matrix((data["vals"], (data["rows"], data["cols"])), shape=shape)


def problem_to_dict(problem: TwoStageProblem) -> Dict[str, Any]:
    fs, ss = problem.first_stage, problem.second_stage
    return {
        "format_version": FORMAT_VERSION,
        "name": problem.name,
        "metadata": problem.metadata,
        "first_stage": {
            "c": _floats(fs.c),
            "A": matrix_to_triplets(fs.A),
            "b": _floats(fs.b),
            "senses": list(fs.senses),
            "lower": _floats(fs.lower),
            "upper": _floats(fs.upper),
            "integer_vars": sorted(fs.integer_vars),
        },
        "second_stage": {
            "q": _floats(ss.q),
            "W": matrix_to_triplets(ss.W),
            "h": _floats(ss.h),
            "T": matrix_to_triplets(ss.T),
            "senses": list(ss.senses),
            "lower": _floats(ss.lower),
            "upper": _floats(ss.upper),
            "integer_vars": sorted(ss.integer_vars),
        },
    }


def problem_from_dict(data: Dict[str, Any]) -> TwoStageProblem:
    try:
        fs, ss = data["first_stage"], data["second_stage"]
        first = FirstStage(
            c=_parse_floats(fs["c"]),
            A=matrix_from_triplets(fs["A"]),
            b=_parse_floats(fs["b"]),
            lower=_parse_floats(fs["lower"]),
            upper=_parse_floats(fs["upper"]),
            integer_vars=frozenset(fs["integer_vars"]),
            senses=tuple(fs["senses"]),
        )
        second = SecondStage(
            q=_parse_floats(ss["q"]),
            W=matrix_from_triplets(ss["W"]),
            h=_parse_floats(ss["h"]),
            T=matrix_from_triplets(ss["T"]),
            senses=tuple(ss["senses"]),
            lower=_parse_floats(ss["lower"]),
            upper=_parse_floats(ss["upper"]),
            integer_vars=frozenset(ss["integer_vars"]),
        )
        return TwoStageProblem(name=data["name"], first_stage=first, second_stage=second,
                               metadata=data.get("metadata", {}))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"invalid problem data: {e}") from e


def scenario_set_to_dict(scenarios: ScenarioSet) -> Dict[str, Any]:
    records = []
    for s in scenarios:
        record: Dict[str, Any] = {
            "id": s.scenario_id,
            "probability": s.probability,
            "features": _floats(s.feature_vector),
        }
        if s.q is not None:
            record["q"] = _floats(s.q)
        if s.h is not None:
            record["h"] = _floats(s.h)
        if s.W is not None:
            record["W"] = matrix_to_triplets(s.W)
        if s.T is not None:
            record["T"] = matrix_to_triplets(s.T)
        records.append(record)
    return {
        "format_version": FORMAT_VERSION,
        "set_id": scenarios.set_id,
        "problem": scenarios.problem_name,
        "metadata": scenarios.metadata,
        "scenarios": records,
    }


def scenario_set_from_dict(data: Dict[str, Any]) -> ScenarioSet:
    try:
        scenarios = []
        for r in data["scenarios"]:
            scenarios.append(Scenario(
                scenario_id=r["id"],
                probability=r["probability"],
                feature_vector=_parse_floats(r["features"]),
                q=_parse_floats(r["q"]) if "q" in r else None,
                W=matrix_from_triplets(r["W"]) if "W" in r else None,
                h=_parse_floats(r["h"]) if "h" in r else None,
                T=matrix_from_triplets(r["T"]) if "T" in r else None,
            ))
        return ScenarioSet(set_id=data["set_id"], scenarios=tuple(scenarios),
                           problem_name=data.get("problem"), metadata=data.get("metadata", {}))
    except (KeyError, TypeError) as e:
        raise FormatError(f"invalid scenario set data: {e}") from e


def dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=1, sort_keys=True)


def save_problem(path: Union[str, Path], problem: TwoStageProblem):
    Path(path).write_text(dumps(problem_to_dict(problem)))
    logger.info(f"Saved problem {problem.name} to {path}")


def load_problem(path: Union[str, Path]) -> TwoStageProblem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from e
    return problem_from_dict(data)


def save_scenarios(path: Union[str, Path], scenarios: ScenarioSet):
    Path(path).write_text(dumps(scenario_set_to_dict(scenarios)))
    logger.info(f"Saved {len(scenarios)} scenarios ({scenarios.set_id}) to {path}")


def load_scenarios(path: Union[str, Path], problem: Optional[TwoStageProblem] = None) -> ScenarioSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from e
    scenarios = scenario_set_from_dict(data)
    if problem is not None and scenarios.problem_name not in (None, problem.name):
        raise FormatError(f"{path}: scenario set belongs to '{scenarios.problem_name}', not '{problem.name}'")
    return scenarios
