from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.lp import LinearProgram, ProgramBuilder
from src.milp import MixedIntegerProgram
from src.spmodel import FirstStage


@dataclass(frozen=True)
class SizeSummary:
    """Column and row counts of an embedded program; aux_* exclude the first-stage columns"""
    method: str
    n_continuous: int
    n_integer: int
    n_binary: int
    n_rows: int
    aux_continuous: int
    aux_binary: int
    hidden_neurons: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class EmbeddedModel:
    program: Union[LinearProgram, MixedIntegerProgram]
    x_indices: np.ndarray
    output_index: int
    size_summary: SizeSummary
    hidden_dims: tuple = ()
    target_mean: float = 0.0
    target_std: float = 1.0
    negated: bool = False

    @property
    def lp(self) -> LinearProgram:
        return self.program.base if isinstance(self.program, MixedIntegerProgram) else self.program

    @property
    def is_mip(self) -> bool:
        return isinstance(self.program, MixedIntegerProgram)

    def first_stage_solution(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float)[self.x_indices]

    def surrogate_value(self, values: np.ndarray) -> float:
        """Denormalized network output read off a program solution"""
        value = self.target_mean + self.target_std * float(np.asarray(values)[self.output_index])
        return -value if self.negated else value

    @property
    def integer_vars(self) -> Optional[frozenset]:
        return self.program.integer_vars if self.is_mip else frozenset()


def add_first_stage(builder: ProgramBuilder, first_stage: FirstStage) -> np.ndarray:
    """x columns with their costs, bounds and integrality, followed by the first-stage rows"""
    cols = np.array([
        builder.add_variable(first_stage.lower[j], first_stage.upper[j], first_stage.c[j], f"x{j}",
                             integer=j in first_stage.integer_vars)
        for j in range(first_stage.n)
    ], dtype=int)
    if first_stage.n_rows:
        first = builder.add_rows(first_stage.senses, first_stage.b)
        builder.add_block(first_stage.A, cols, first)
    return cols


def finish_program(builder: ProgramBuilder, method: str, n_first: int,
                   hidden_neurons: int) -> Tuple[Union[LinearProgram, MixedIntegerProgram], SizeSummary]:
    if builder.integer_vars:
        program = MixedIntegerProgram.from_builder(builder)
        lp, integers, binaries = program.base, program.integer_vars, program.binary_vars
    else:
        program = builder.build_lp()
        lp, integers, binaries = program, frozenset(), frozenset()
    first = set(range(n_first))
    summary = SizeSummary(
        method=method,
        n_continuous=lp.n_vars - len(integers),
        n_integer=len(integers),
        n_binary=len(binaries),
        n_rows=lp.n_rows,
        aux_continuous=sum(1 for j in range(n_first, lp.n_vars) if j not in integers),
        aux_binary=len(binaries - first),
        hidden_neurons=hidden_neurons,
    )
    return program, summary
