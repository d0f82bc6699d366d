import numpy as np
import scipy.sparse as sp
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

LE = "<="
EQ = "="
GE = ">="
SENSES = (LE, EQ, GE)

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    min/max  c^T x + offset
    s.t.     A_i x  (<=, =, >=)  rhs_i
             lower <= x <= upper   (infinite bounds allowed)
    """
    objective: np.ndarray
    matrix: sp.csr_matrix
    senses: Tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sense: str = MINIMIZE
    objective_offset: float = 0.0
    var_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        objective = _frozen(self.objective)
        n = objective.size
        matrix = sp.csr_matrix(self.matrix, dtype=float, copy=True)
        if matrix.shape[0] == 0 and matrix.shape[1] != n:
            matrix = sp.csr_matrix((0, n))
        if matrix.shape[1] != n:
            raise ValueError(f"constraint matrix has {matrix.shape[1]} columns for {n} variables")
        matrix.sum_duplicates()
        matrix.sort_indices()
        rhs = _frozen(self.rhs)
        senses = tuple(self.senses)
        if len(senses) != matrix.shape[0] or rhs.size != matrix.shape[0]:
            raise ValueError("senses and rhs must have one entry per constraint row")
        bad = [s for s in senses if s not in SENSES]
        if bad:
            raise ValueError(f"unknown constraint senses: {sorted(set(bad))}")
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        if lower.size != n or upper.size != n:
            raise ValueError("bounds must have one entry per variable")
        if np.any(lower > upper):
            j = int(np.argmax(lower > upper))
            raise ValueError(f"variable {j} has lower bound {lower[j]} above upper bound {upper[j]}")
        if np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise ValueError("lower bounds cannot be +inf and upper bounds cannot be -inf")
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"unknown objective sense '{self.sense}'")
        if self.var_names is not None and len(self.var_names) != n:
            raise ValueError("var_names must name every variable")
        for arr in (matrix.data, matrix.indices, matrix.indptr):
            arr.setflags(write=False)

        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "objective_offset", float(self.objective_offset))
        if self.var_names is not None:
            object.__setattr__(self, "var_names", tuple(self.var_names))

    @property
    def n_vars(self) -> int:
        return int(self.objective.size)

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    def names(self) -> List[str]:
        if self.var_names is not None:
            return list(self.var_names)
        return [f"x{j}" for j in range(self.n_vars)]

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective @ np.asarray(x, dtype=float) + self.objective_offset)

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest absolute violation over rows and bounds"""
        x = np.asarray(x, dtype=float)
        act = self.row_activity(x)
        worst = 0.0
        for i, s in enumerate(self.senses):
            diff = act[i] - self.rhs[i]
            if s == LE:
                worst = max(worst, diff)
            elif s == GE:
                worst = max(worst, -diff)
            else:
                worst = max(worst, abs(diff))
        if x.size:
            worst = max(worst, float(np.max(self.lower - x, initial=0.0)), float(np.max(x - self.upper, initial=0.0)))
        return float(worst)

    def with_bounds(self, lower: np.ndarray, upper: np.ndarray) -> "LinearProgram":
        return LinearProgram(
            objective=self.objective,
            matrix=self.matrix,
            senses=self.senses,
            rhs=self.rhs,
            lower=lower,
            upper=upper,
            sense=self.sense,
            objective_offset=self.objective_offset,
            var_names=self.var_names,
        )

    @classmethod
    def from_rows(
        cls,
        objective: Sequence[float],
        rows: Iterable[Tuple[Mapping[int, float], str, float]] = (),
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
        sense: str = MINIMIZE,
        objective_offset: float = 0.0,
    ) -> "LinearProgram":
        """Build from ``({var: coef}, sense, rhs)`` rows; bounds default to [0, inf)"""
        n = len(objective)
        builder = ProgramBuilder()
        lo = [0.0] * n if lower is None else list(lower)
        hi = [np.inf] * n if upper is None else list(upper)
        for j in range(n):
            builder.add_variable(lo[j], hi[j], objective[j])
        for coeffs, row_sense, rhs in rows:
            builder.add_constraint(coeffs, row_sense, rhs)
        builder.objective_offset = objective_offset
        builder.sense = sense
        return builder.build_lp()


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpSolution:
    """
    Result of a simplex solve. primal/dual/reduced_costs are None unless status is OPTIMAL.
    Duals follow c = A^T dual + reduced_costs in the program's own objective sense.
    """
    status: LpStatus
    primal: Optional[np.ndarray] = None
    dual: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    objective: float = float("nan")
    dual_objective: float = float("nan")
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


class ProgramBuilder:
    """
    Incremental column/row collector used to assemble programs from blocks.
    Integrality marks are kept here so one builder can produce either an LP or a MIP.
    """

    def __init__(self):
        self.costs: List[float] = []
        self.lower: List[float] = []
        self.upper: List[float] = []
        self.names: List[str] = []
        self.integer_vars: List[int] = []
        self._rows: List[int] = []
        self._cols: List[int] = []
        self._vals: List[float] = []
        self.senses: List[str] = []
        self.rhs: List[float] = []
        self.sense = MINIMIZE
        self.objective_offset = 0.0

    @property
    def n_vars(self) -> int:
        return len(self.costs)

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def add_variable(self, lower: float = 0.0, upper: float = np.inf, cost: float = 0.0,
                     name: Optional[str] = None, integer: bool = False) -> int:
        j = len(self.costs)
        self.costs.append(float(cost))
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.names.append(name or f"x{j}")
        if integer:
            self.integer_vars.append(j)
        return j

    def add_variables(self, count: int, lower=0.0, upper=np.inf, cost=0.0,
                      prefix: str = "x", integer: bool = False) -> np.ndarray:
        lower = np.broadcast_to(np.asarray(lower, dtype=float), (count,))
        upper = np.broadcast_to(np.asarray(upper, dtype=float), (count,))
        cost = np.broadcast_to(np.asarray(cost, dtype=float), (count,))
        return np.array([
            self.add_variable(lower[k], upper[k], cost[k], f"{prefix}{k}", integer)
            for k in range(count)
        ], dtype=int)

    def add_constraint(self, coeffs: Union[Mapping[int, float], Tuple[Sequence[int], Sequence[float]]],
                       sense: str, rhs: float) -> int:
        if sense not in SENSES:
            raise ValueError(f"unknown constraint sense '{sense}'")
        i = len(self.rhs)
        if isinstance(coeffs, Mapping):
            items = list(coeffs.items())
        else:
            items = list(zip(coeffs[0], coeffs[1]))
        for j, v in items:
            if v != 0.0:
                self._rows.append(i)
                self._cols.append(int(j))
                self._vals.append(float(v))
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        return i

    def add_block(self, block: sp.spmatrix, col_index: np.ndarray, row_offset: int):
        """Scatter a sparse block into already-declared rows starting at row_offset"""
        coo = sp.coo_matrix(block)
        col_index = np.asarray(col_index, dtype=int)
        self._rows.extend((coo.row + row_offset).tolist())
        self._cols.extend(col_index[coo.col].tolist())
        self._vals.extend(coo.data.astype(float).tolist())

    def add_rows(self, senses: Sequence[str], rhs: Sequence[float]) -> int:
        """Declare empty rows to be filled by add_block; returns the first row index"""
        first = len(self.rhs)
        for s, r in zip(senses, rhs):
            if s not in SENSES:
                raise ValueError(f"unknown constraint sense '{s}'")
            self.senses.append(s)
            self.rhs.append(float(r))
        return first

    def matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self._vals, (self._rows, self._cols)),
            shape=(len(self.rhs), len(self.costs)),
        )

    def build_lp(self) -> LinearProgram:
        return LinearProgram(
            objective=np.array(self.costs),
            matrix=self.matrix(),
            senses=tuple(self.senses),
            rhs=np.array(self.rhs),
            lower=np.array(self.lower),
            upper=np.array(self.upper),
            sense=self.sense,
            objective_offset=self.objective_offset,
            var_names=tuple(self.names),
        )
