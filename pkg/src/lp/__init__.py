"""
Linear programs: the immutable program type, a bounded-variable revised simplex,
a brute-force vertex enumerator and the plain-text interchange format.
"""

from .program import (
    EQ,
    GE,
    LE,
    MAXIMIZE,
    MINIMIZE,
    LinearProgram,
    LpSolution,
    LpStatus,
    ProgramBuilder,
)
from .simplex import RevisedSimplex, solve_lp
from .vertices import best_vertex, enumerate_vertices
from .lp_format import load_lp, read_lp_text, save_lp, write_lp_text

__all__ = [
    "EQ",
    "GE",
    "LE",
    "MAXIMIZE",
    "MINIMIZE",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "ProgramBuilder",
    "RevisedSimplex",
    "solve_lp",
    "best_vertex",
    "enumerate_vertices",
    "load_lp",
    "read_lp_text",
    "save_lp",
    "write_lp_text",
]
