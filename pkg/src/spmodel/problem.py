from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.errors import DimensionMismatch, EmptyScenarioSet
from src.lp import EQ, GE, LE

PROBABILITY_TOL = 1e-9


def _vec(values, size: Optional[int] = None, fill: float = 0.0) -> np.ndarray:
    if values is None:
        arr = np.full(size, fill, dtype=float)
    else:
        arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _mat(values, shape: Tuple[int, int]) -> sp.csr_matrix:
    if values is None:
        return sp.csr_matrix(shape)
    matrix = sp.csr_matrix(values, dtype=float, copy=True)
    if matrix.shape != shape:
        raise DimensionMismatch(f"expected a {shape} matrix, got {matrix.shape}")
    return matrix


@dataclass(frozen=True, eq=False)
class FirstStage:
    """min c^T x  s.t.  A x (senses) b,  lower <= x <= upper,  x_j integer for j in integer_vars"""
    c: np.ndarray
    A: Optional[sp.csr_matrix] = None
    b: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    integer_vars: FrozenSet[int] = frozenset()
    senses: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        c = _vec(self.c)
        n = c.size
        b = _vec(self.b, 0)
        A = _mat(self.A, (b.size, n))
        senses = tuple(self.senses) if self.senses is not None else (EQ,) * b.size
        if len(senses) != b.size:
            raise DimensionMismatch("first-stage senses must match the rows of A")
        lower = _vec(self.lower, n, 0.0)
        upper = _vec(self.upper, n, np.inf)
        if lower.size != n or upper.size != n:
            raise DimensionMismatch("first-stage bounds must match the length of c")
        integer_vars = frozenset(int(j) for j in self.integer_vars)
        if any(j < 0 or j >= n for j in integer_vars):
            raise DimensionMismatch("first-stage integer index out of range")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integer_vars", integer_vars)

    @property
    def n(self) -> int:
        return int(self.c.size)

    @property
    def n_rows(self) -> int:
        return int(self.b.size)

    def with_bounds(self, lower: Sequence[float], upper: Sequence[float]) -> "FirstStage":
        return FirstStage(self.c, self.A, self.b, lower, upper, self.integer_vars, self.senses)

    def is_feasible(self, x: np.ndarray, tol: float = 1e-6, check_integrality: bool = True) -> bool:
        x = np.asarray(x, dtype=float)
        if x.size != self.n:
            return False
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        if check_integrality and self.integer_vars:
            idx = sorted(self.integer_vars)
            if np.any(np.abs(x[idx] - np.round(x[idx])) > tol):
                return False
        if self.n_rows:
            act = self.A @ x
            for i, s in enumerate(self.senses):
                diff = act[i] - self.b[i]
                if (s == LE and diff > tol) or (s == GE and diff < -tol) or (s == EQ and abs(diff) > tol):
                    return False
        return True


@dataclass(frozen=True, eq=False)
class SecondStage:
    """
    Template for  min q^T y  s.t.  W y (senses) h - T x,  y_lower <= y <= y_upper.
    Scenarios may override q, W, h and T; everything else is shared.
    """
    q: np.ndarray
    W: sp.csr_matrix
    h: np.ndarray
    T: sp.csr_matrix
    senses: Optional[Tuple[str, ...]] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    integer_vars: FrozenSet[int] = frozenset()

    def __post_init__(self):
        q = _vec(self.q)
        h = _vec(self.h)
        n_y, m_y = q.size, h.size
        W = _mat(self.W, (m_y, n_y))
        T = sp.csr_matrix(self.T, dtype=float, copy=True)
        if T.shape[0] != m_y:
            raise DimensionMismatch(f"T has {T.shape[0]} rows, second stage has {m_y}")
        senses = tuple(self.senses) if self.senses is not None else (EQ,) * m_y
        if len(senses) != m_y:
            raise DimensionMismatch("second-stage senses must match the rows of W")
        lower = _vec(self.lower, n_y, 0.0)
        upper = _vec(self.upper, n_y, np.inf)
        integer_vars = frozenset(int(j) for j in self.integer_vars)
        if any(j < 0 or j >= n_y for j in integer_vars):
            raise DimensionMismatch("second-stage integer index out of range")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integer_vars", integer_vars)

    @property
    def n_y(self) -> int:
        return int(self.q.size)

    @property
    def m_y(self) -> int:
        return int(self.h.size)


@dataclass(frozen=True, eq=False)
class Scenario:
    scenario_id: str
    probability: float
    feature_vector: np.ndarray
    q: Optional[np.ndarray] = None
    W: Optional[sp.csr_matrix] = None
    h: Optional[np.ndarray] = None
    T: Optional[sp.csr_matrix] = None

    def __post_init__(self):
        p = float(self.probability)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"scenario {self.scenario_id}: probability {p} outside [0, 1]")
        object.__setattr__(self, "probability", p)
        object.__setattr__(self, "feature_vector", _vec(self.feature_vector))
        if self.q is not None:
            object.__setattr__(self, "q", _vec(self.q))
        if self.h is not None:
            object.__setattr__(self, "h", _vec(self.h))
        if self.W is not None:
            object.__setattr__(self, "W", sp.csr_matrix(self.W, dtype=float, copy=True))
        if self.T is not None:
            object.__setattr__(self, "T", sp.csr_matrix(self.T, dtype=float, copy=True))

    def with_probability(self, p: float) -> "Scenario":
        return Scenario(self.scenario_id, p, self.feature_vector, self.q, self.W, self.h, self.T)


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    set_id: str
    scenarios: Tuple[Scenario, ...]
    problem_name: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        scenarios = tuple(self.scenarios)
        if not scenarios:
            raise EmptyScenarioSet(f"scenario set '{self.set_id}' is empty")
        total = sum(s.probability for s in scenarios)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"scenario set '{self.set_id}': probabilities sum to {total!r}, expected 1")
        ids = [s.scenario_id for s in scenarios]
        if len(set(ids)) != len(ids):
            raise ValueError(f"scenario set '{self.set_id}' has duplicate scenario ids")
        object.__setattr__(self, "scenarios", scenarios)

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    @property
    def ids(self) -> List[str]:
        return [s.scenario_id for s in self.scenarios]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([s.probability for s in self.scenarios])

    def by_id(self, scenario_id: str) -> Scenario:
        for s in self.scenarios:
            if s.scenario_id == scenario_id:
                return s
        raise KeyError(f"scenario '{scenario_id}' not in set '{self.set_id}'")

    def features(self) -> np.ndarray:
        return np.vstack([s.feature_vector for s in self.scenarios])

    @classmethod
    def uniform(cls, set_id: str, scenarios: Iterable[Scenario], problem_name: Optional[str] = None,
                metadata: Optional[Dict[str, Any]] = None) -> "ScenarioSet":
        scenarios = list(scenarios)
        if not scenarios:
            raise EmptyScenarioSet(f"scenario set '{set_id}' is empty")
        p = 1.0 / len(scenarios)
        reweighted = tuple(s.with_probability(p) for s in scenarios)
        return cls(set_id, reweighted, problem_name, metadata or {})

    def subset(self, scenario_ids: Sequence[str], set_id: Optional[str] = None) -> "ScenarioSet":
        chosen = [self.by_id(sid) for sid in scenario_ids]
        return ScenarioSet.uniform(set_id or f"{self.set_id}[{len(chosen)}]", chosen, self.problem_name)


@dataclass(frozen=True, eq=False)
class TwoStageProblem:
    name: str
    first_stage: FirstStage
    second_stage: SecondStage
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.second_stage.T.shape[1] != self.first_stage.n:
            raise DimensionMismatch(
                f"T maps {self.second_stage.T.shape[1]} first-stage columns, first stage has {self.first_stage.n}"
            )

    @property
    def n_first(self) -> int:
        return self.first_stage.n

    @property
    def second_stage_integer_vars(self) -> FrozenSet[int]:
        return self.second_stage.integer_vars

    @property
    def family(self) -> Optional[str]:
        return self.metadata.get("family")

    def scenario_data(self, scenario: Scenario) -> Tuple[np.ndarray, sp.csr_matrix, np.ndarray, sp.csr_matrix]:
        """Resolve (q, W, h, T) for a scenario, falling back on the template"""
        tpl = self.second_stage
        q = tpl.q if scenario.q is None else scenario.q
        W = tpl.W if scenario.W is None else scenario.W
        h = tpl.h if scenario.h is None else scenario.h
        T = tpl.T if scenario.T is None else scenario.T
        if q.size != tpl.n_y or h.size != tpl.m_y or W.shape != (tpl.m_y, tpl.n_y) \
                or T.shape != (tpl.m_y, self.first_stage.n):
            raise DimensionMismatch(f"scenario {scenario.scenario_id} data does not match the template")
        return q, W, h, T
