from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Optional, Union

import numpy as np

from src.lp import LinearProgram, ProgramBuilder, read_lp_text, write_lp_text


@dataclass(frozen=True, eq=False)
class MixedIntegerProgram:
    base: LinearProgram
    integer_vars: FrozenSet[int] = frozenset()
    binary_vars: FrozenSet[int] = frozenset()

    def __post_init__(self):
        integer_vars = frozenset(int(j) for j in self.integer_vars)
        binary_vars = frozenset(int(j) for j in self.binary_vars)
        n = self.base.n_vars
        bad = [j for j in integer_vars if j < 0 or j >= n]
        if bad:
            raise ValueError(f"integer variable indices out of range: {sorted(bad)}")
        if not binary_vars <= integer_vars:
            raise ValueError("binary_vars must be a subset of integer_vars")
        for j in binary_vars:
            if self.base.lower[j] != 0.0 or self.base.upper[j] != 1.0:
                raise ValueError(f"binary variable {j} must have bounds [0, 1]")
        object.__setattr__(self, "integer_vars", integer_vars)
        object.__setattr__(self, "binary_vars", binary_vars)

    @property
    def n_vars(self) -> int:
        return self.base.n_vars

    @property
    def n_integer(self) -> int:
        return len(self.integer_vars)

    def integer_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vars, dtype=bool)
        mask[list(self.integer_vars)] = True
        return mask

    @classmethod
    def from_builder(cls, builder: ProgramBuilder) -> "MixedIntegerProgram":
        base = builder.build_lp()
        integers = frozenset(builder.integer_vars)
        binaries = frozenset(j for j in integers if base.lower[j] == 0.0 and base.upper[j] == 1.0)
        return cls(base=base, integer_vars=integers, binary_vars=binaries)


def lp_relaxation(mip: Union[MixedIntegerProgram, LinearProgram]) -> LinearProgram:
    """Drop integrality; bounds and rows are kept as they are"""
    if isinstance(mip, LinearProgram):
        return mip
    return mip.base


def write_mip_text(mip: Union[MixedIntegerProgram, LinearProgram]) -> str:
    if isinstance(mip, LinearProgram):
        return write_lp_text(mip)
    return write_lp_text(mip.base, mip.integer_vars)


def read_mip_text(text: str) -> MixedIntegerProgram:
    lp, integers = read_lp_text(text)
    binaries = [j for j in integers if lp.lower[j] == 0.0 and lp.upper[j] == 1.0]
    return MixedIntegerProgram(base=lp, integer_vars=frozenset(integers), binary_vars=frozenset(binaries))


class MilpStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    TIME_LIMIT = "time_limit"


@dataclass
class NodeRecord:
    node_id: int
    depth: int
    bound: float
    incumbent: float
    time_s: float


@dataclass
class MilpSolution:
    status: MilpStatus
    incumbent: Optional[np.ndarray]
    objective: float
    bound: float
    gap: float
    node_count: int
    node_log: List[NodeRecord] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def has_incumbent(self) -> bool:
        return self.incumbent is not None


@dataclass
class SolverConfig:
    gap_tol: float = 1e-9
    node_limit: int = 100000
    time_limit_s: float = 600.0
    integrality_tol: float = 1e-6
    node_log_path: Optional[str] = None

    def __post_init__(self):
        if self.gap_tol < 0:
            raise ValueError("gap_tol must be non-negative")
        if self.node_limit < 1:
            raise ValueError("node_limit must be at least 1")
        if self.time_limit_s <= 0:
            raise ValueError("time_limit_s must be positive")
