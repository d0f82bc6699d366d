"""
Mixed-integer programs and an LP-based branch and bound solver.
"""

from .program import (
    MilpSolution,
    MilpStatus,
    MixedIntegerProgram,
    NodeRecord,
    SolverConfig,
    lp_relaxation,
    read_mip_text,
    write_mip_text,
)
from .branch_and_bound import BranchAndBound, relative_gap, solve_milp, write_node_log

__all__ = [
    "MilpSolution",
    "MilpStatus",
    "MixedIntegerProgram",
    "NodeRecord",
    "SolverConfig",
    "lp_relaxation",
    "read_mip_text",
    "write_mip_text",
    "BranchAndBound",
    "relative_gap",
    "solve_milp",
    "write_node_log",
]
