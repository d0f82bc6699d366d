import itertools
import logging
from typing import List, Tuple

import numpy as np

from src.errors import TooLarge, UnboundedRegion
from .program import EQ, MAXIMIZE, LinearProgram
from .simplex import solve_lp

logger = logging.getLogger(__name__)

MAX_VERTEX_VARS = 12
DEDUP_TOL = 1e-9
FEAS_TOL = 1e-7
RANK_TOL = 1e-10


def _independent_equalities(dense: np.ndarray, senses) -> List[int]:
    """Greedy row basis of the equality rows; dependent rows are left to the feasibility check"""
    kept: List[int] = []
    for i, s in enumerate(senses):
        if s != EQ or not np.any(dense[i]):
            continue
        if np.linalg.matrix_rank(dense[kept + [i]], tol=RANK_TOL) == len(kept) + 1:
            kept.append(i)
    return kept


def _hyperplanes(lp: LinearProgram) -> Tuple[np.ndarray, np.ndarray, List[bool]]:
    """Rows and finite bounds as (a, beta, always_active) hyperplanes a^T x = beta"""
    n = lp.n_vars
    dense = lp.matrix.toarray()
    equalities = set(_independent_equalities(dense, lp.senses))
    normals, offsets, forced = [], [], []
    for i, s in enumerate(lp.senses):
        if s == EQ and i not in equalities:
            continue
        normals.append(dense[i])
        offsets.append(lp.rhs[i])
        forced.append(s == EQ)
    eye = np.eye(n)
    for j in range(n):
        if np.isfinite(lp.lower[j]):
            normals.append(eye[j])
            offsets.append(lp.lower[j])
            forced.append(False)
        if np.isfinite(lp.upper[j]) and lp.upper[j] != lp.lower[j]:
            normals.append(eye[j])
            offsets.append(lp.upper[j])
            forced.append(False)
    return np.array(normals).reshape(-1, n), np.array(offsets), forced


def _is_feasible(lp: LinearProgram, x: np.ndarray) -> bool:
    scale = 1.0 + float(np.max(np.abs(x), initial=0.0))
    return lp.max_violation(x) <= FEAS_TOL * scale


def _check_bounded(lp: LinearProgram):
    """
    Raise UnboundedRegion if the recession cone of the feasible region is nontrivial.
    Each direction component is maximized and minimized over the cone cut by the unit box.
    """
    n = lp.n_vars
    if np.all(np.isfinite(lp.lower)) and np.all(np.isfinite(lp.upper)):
        return
    lower = np.where(np.isfinite(lp.lower), 0.0, -1.0)
    upper = np.where(np.isfinite(lp.upper), 0.0, 1.0)
    cone = LinearProgram(
        objective=np.zeros(n),
        matrix=lp.matrix,
        senses=lp.senses,
        rhs=np.zeros(lp.n_rows),
        lower=lower,
        upper=upper,
    )
    for j in range(n):
        if lower[j] == upper[j]:
            continue
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = sign
            probe = LinearProgram(cone.objective + c, cone.matrix, cone.senses, cone.rhs,
                                  cone.lower, cone.upper, sense=MAXIMIZE)
            sol = solve_lp(probe)
            if sol.is_optimal and sol.objective > DEDUP_TOL:
                raise UnboundedRegion(f"recession direction found along variable {j}")


def enumerate_vertices(lp: LinearProgram) -> List[Tuple[np.ndarray, float]]:
    """
    Brute-force basic feasible solutions: every n-subset of rows/bounds is solved
    as a square system and kept if feasible. Results are deduplicated within 1e-9
    and returned in discovery order.
    """
    n = lp.n_vars
    if n > MAX_VERTEX_VARS:
        raise TooLarge(f"vertex enumeration limited to {MAX_VERTEX_VARS} variables, got {n}")
    if n == 0:
        return [(np.zeros(0), lp.objective_offset)] if _is_feasible(lp, np.zeros(0)) else []
    _check_bounded(lp)

    normals, offsets, forced = _hyperplanes(lp)
    must = [k for k, f in enumerate(forced) if f]
    optional = [k for k, f in enumerate(forced) if not f]
    # independent equalities never outnumber the variables
    free_slots = n - len(must)
    vertices: List[Tuple[np.ndarray, float]] = []
    for extra in itertools.combinations(optional, free_slots):
        active = must + list(extra)
        M = normals[active]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, offsets[active])
        if not _is_feasible(lp, x):
            continue
        if any(np.max(np.abs(x - v)) <= DEDUP_TOL for v, _ in vertices):
            continue
        vertices.append((x, lp.objective_value(x)))

    logger.debug(f"Enumerated {len(vertices)} vertices for {n} variables")
    return vertices


def best_vertex(lp: LinearProgram) -> Tuple[np.ndarray, float]:
    """Vertex with the best objective in the program's own sense"""
    vertices = enumerate_vertices(lp)
    if not vertices:
        raise ValueError("feasible region has no vertices")
    pick = max if lp.sense == MAXIMIZE else min
    return pick(vertices, key=lambda item: item[1])
