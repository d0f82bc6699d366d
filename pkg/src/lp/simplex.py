import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from config import settings
from src.errors import IterationLimitReached, NumericalBreakdown
from .program import GE, LE, MAXIMIZE, LinearProgram, LpSolution, LpStatus

logger = logging.getLogger(__name__)


@dataclass
class _Column:
    """How an original variable is recovered: x_j = shift + sum(coef * x'_col)"""
    shift: float
    parts: List[Tuple[int, float]]


class _StandardForm:
    """
    Internal form  min c'x'  s.t.  A'x' = b' (b' >= 0),  0 <= x' <= u'.
    Finite lower bounds are shifted to 0, upper-only variables negated,
    free variables split, inequality rows receive slacks.
    """

    def __init__(self, lp: LinearProgram):
        m, n = lp.n_rows, lp.n_vars
        sign = -1.0 if lp.sense == MAXIMIZE else 1.0
        c = sign * lp.objective
        A = lp.matrix.tocsc()

        cols: List[sp.csc_matrix] = []
        costs: List[float] = []
        upper: List[float] = []
        self.columns: List[_Column] = []
        shift = np.zeros(n)
        offset = 0.0

        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            a_j = A[:, j]
            if np.isfinite(lo):
                k = len(costs)
                cols.append(a_j)
                costs.append(c[j])
                upper.append(hi - lo)
                shift[j] = lo
                self.columns.append(_Column(lo, [(k, 1.0)]))
            elif np.isfinite(hi):
                k = len(costs)
                cols.append(-a_j)
                costs.append(-c[j])
                upper.append(np.inf)
                shift[j] = hi
                self.columns.append(_Column(hi, [(k, -1.0)]))
            else:
                k = len(costs)
                cols.extend([a_j, -a_j])
                costs.extend([c[j], -c[j]])
                upper.extend([np.inf, np.inf])
                self.columns.append(_Column(0.0, [(k, 1.0), (k + 1, -1.0)]))
            offset += c[j] * shift[j]

        b = lp.rhs - lp.matrix @ shift
        self.n_structural = len(costs)

        # slacks
        slack_of_row = np.full(m, -1, dtype=int)
        for i, s in enumerate(lp.senses):
            if s in (LE, GE):
                col = sp.csc_matrix(([1.0 if s == LE else -1.0], ([i], [0])), shape=(m, 1))
                slack_of_row[i] = len(costs)
                cols.append(col)
                costs.append(0.0)
                upper.append(np.inf)

        matrix = sp.hstack(cols, format="csc") if cols else sp.csc_matrix((m, 0))
        row_sign = np.where(b < 0, -1.0, 1.0)
        matrix = sp.diags(row_sign) @ matrix if m else matrix
        b = row_sign * b

        # crash basis: a slack with +1 coefficient after the sign flip, else an artificial
        basis = np.full(m, -1, dtype=int)
        art_cols = []
        self.artificials: List[int] = []
        for i in range(m):
            k = slack_of_row[i]
            if k >= 0 and row_sign[i] * (1.0 if lp.senses[i] == LE else -1.0) > 0:
                basis[i] = k
            else:
                art_cols.append(sp.csc_matrix(([1.0], ([i], [0])), shape=(m, 1)))
                basis[i] = len(costs)
                self.artificials.append(len(costs))
                costs.append(0.0)
                upper.append(np.inf)
        if art_cols:
            matrix = sp.hstack([matrix] + art_cols, format="csc")

        self.matrix = sp.csc_matrix(matrix)
        self.b = b
        self.cost = np.array(costs, dtype=float)
        self.upper = np.array(upper, dtype=float)
        self.row_sign = row_sign
        self.objective_sign = sign
        self.offset = offset
        self.initial_basis = basis
        self.m = m

    def recover(self, xp: np.ndarray) -> np.ndarray:
        x = np.empty(len(self.columns))
        for j, col in enumerate(self.columns):
            x[j] = col.shift + sum(coef * xp[k] for k, coef in col.parts)
        return x


class _Basis:
    """LU factors of the current basis; dense below the nonzero limit, SuperLU above it"""

    def __init__(self, B, dense: bool, breakdown_tol: float):
        self.dense = dense
        if dense:
            self.lu = sla.lu_factor(B, check_finite=False)
            diag = np.abs(np.diag(self.lu[0]))
            if diag.size and np.min(diag) < breakdown_tol:
                raise NumericalBreakdown(f"basis is singular (min |U_ii| = {np.min(diag):.3e})")
        else:
            try:
                self.lu = spla.splu(sp.csc_matrix(B))
            except RuntimeError as e:
                raise NumericalBreakdown(f"sparse basis factorization failed: {e}") from e

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.dense:
            return sla.lu_solve(self.lu, rhs, check_finite=False)
        return self.lu.solve(rhs)

    def solve_transposed(self, rhs: np.ndarray) -> np.ndarray:
        if self.dense:
            return sla.lu_solve(self.lu, rhs, trans=1, check_finite=False)
        return self.lu.solve(rhs, trans="T")


class RevisedSimplex:
    """
    Two-phase bounded-variable revised simplex.
    Dantzig pricing; switches to Bland's rule after degenerate_pivot_factor * m
    consecutive degenerate pivots. The basis is refactored every iteration.
    """

    def __init__(self, feasibility_tol: Optional[float] = None, optimality_tol: Optional[float] = None,
                 pivot_tol: Optional[float] = None, max_iterations: Optional[int] = None):
        self.feasibility_tol = settings.feasibility_tol if feasibility_tol is None else feasibility_tol
        self.optimality_tol = settings.optimality_tol if optimality_tol is None else optimality_tol
        self.pivot_tol = settings.pivot_tol if pivot_tol is None else pivot_tol
        self.breakdown_tol = settings.breakdown_tol
        # 0 derives the limit from the problem size
        self.max_iterations = settings.max_simplex_iterations if max_iterations is None else max_iterations
        self.logger = logging.getLogger(__name__)
        for name in ("feasibility_tol", "optimality_tol", "pivot_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be non-negative, got {self.max_iterations}")

    def solve(self, lp: LinearProgram) -> LpSolution:
        if lp.n_rows == 0:
            return self._solve_unconstrained(lp)

        form = _StandardForm(lp)
        m = form.m
        n_total = form.cost.size
        dense = form.matrix.nnz <= settings.dense_nonzero_limit
        A = form.matrix.toarray() if dense else form.matrix
        limit = self.max_iterations or max(1000, 50 * (m + n_total))

        basis = form.initial_basis.copy()
        at_upper = np.zeros(n_total, dtype=bool)
        upper = form.upper.copy()
        iterations = 0

        if form.artificials:
            phase1_cost = np.zeros(n_total)
            phase1_cost[form.artificials] = 1.0
            status, basis, at_upper, xB, iterations = self._iterate(
                A, form.b, phase1_cost, upper, basis, at_upper, dense, limit, iterations
            )
            infeasibility = float(phase1_cost[basis] @ xB)
            scale = max(1.0, float(np.max(np.abs(form.b), initial=0.0)))
            if infeasibility > self.feasibility_tol * scale:
                self.logger.debug(f"Phase 1 ended with infeasibility {infeasibility:.3e}")
                return LpSolution(status=LpStatus.INFEASIBLE, iterations=iterations)
            # artificials stay in the problem pinned at zero
            upper[form.artificials] = 0.0
            at_upper[form.artificials] = False

        status, basis, at_upper, xB, iterations = self._iterate(
            A, form.b, form.cost, upper, basis, at_upper, dense, limit, iterations
        )
        if status == LpStatus.UNBOUNDED:
            return LpSolution(status=LpStatus.UNBOUNDED, iterations=iterations)

        xp = np.where(at_upper, upper, 0.0)
        xp[basis] = xB
        x = form.recover(xp)

        factor = _Basis(self._basis_matrix(A, basis, dense), dense, self.breakdown_tol)
        y_internal = factor.solve_transposed(form.cost[basis])
        # back to original rows and original objective sense
        dual = form.objective_sign * form.row_sign * y_internal
        return self._finish(lp, x, dual, iterations)

    def _finish(self, lp: LinearProgram, x: np.ndarray, dual: np.ndarray, iterations: int) -> LpSolution:
        reduced = lp.objective - lp.matrix.T @ dual
        objective = lp.objective_value(x)
        dual_objective = float(lp.rhs @ dual) + lp.objective_offset
        sign = -1.0 if lp.sense == MAXIMIZE else 1.0
        for j in range(lp.n_vars):
            r = reduced[j]
            if abs(r) <= self.optimality_tol:
                dual_objective += r * x[j]
            elif sign * r > 0 and np.isfinite(lp.lower[j]):
                dual_objective += r * lp.lower[j]
            elif sign * r < 0 and np.isfinite(lp.upper[j]):
                dual_objective += r * lp.upper[j]
            else:
                dual_objective += r * x[j]

        violation = lp.max_violation(x)
        if violation > self.feasibility_tol:
            self.logger.warning(f"Primal residual {violation:.3e} exceeds feasibility tolerance")
        return LpSolution(
            status=LpStatus.OPTIMAL,
            primal=x,
            dual=dual,
            reduced_costs=reduced,
            objective=objective,
            dual_objective=dual_objective,
            iterations=iterations,
        )

    def _solve_unconstrained(self, lp: LinearProgram) -> LpSolution:
        sign = -1.0 if lp.sense == MAXIMIZE else 1.0
        c = sign * lp.objective
        x = np.zeros(lp.n_vars)
        for j in range(lp.n_vars):
            lo, hi = lp.lower[j], lp.upper[j]
            if c[j] > 0:
                if not np.isfinite(lo):
                    return LpSolution(status=LpStatus.UNBOUNDED)
                x[j] = lo
            elif c[j] < 0:
                if not np.isfinite(hi):
                    return LpSolution(status=LpStatus.UNBOUNDED)
                x[j] = hi
            else:
                x[j] = lo if np.isfinite(lo) else (hi if np.isfinite(hi) else 0.0)
        return self._finish(lp, x, np.zeros(0), 0)

    @staticmethod
    def _basis_matrix(A, basis: np.ndarray, dense: bool):
        if dense:
            return A[:, basis]
        return A[:, basis].tocsc()

    def _iterate(self, A, b, cost, upper, basis, at_upper, dense, limit, iterations):
        m = b.size
        n_total = cost.size
        bland = False
        degenerate_run = 0
        degenerate_limit = settings.degenerate_pivot_factor * m
        in_basis = np.zeros(n_total, dtype=bool)
        in_basis[basis] = True

        while True:
            if iterations >= limit:
                raise IterationLimitReached(f"simplex exceeded {limit} iterations")
            factor = _Basis(self._basis_matrix(A, basis, dense), dense, self.breakdown_tol)

            rhs = b.copy()
            moved = np.flatnonzero(at_upper & ~in_basis)
            if moved.size:
                rhs -= A[:, moved] @ upper[moved]
            xB = factor.solve(rhs)
            y = factor.solve_transposed(cost[basis])
            d = cost - A.T @ y

            movable = ~in_basis & (upper > 0)
            gain = np.where(at_upper, d, -d)
            candidates = np.flatnonzero(movable & (gain > self.optimality_tol))
            if candidates.size == 0:
                return LpStatus.OPTIMAL, basis, at_upper, xB, iterations

            if bland:
                entering = int(candidates[0])
            else:
                entering = int(candidates[np.argmax(gain[candidates])])
            direction = -1.0 if at_upper[entering] else 1.0

            a_col = A[:, entering]
            if not dense:
                a_col = a_col.toarray().ravel()
            alpha = factor.solve(a_col)
            delta = direction * alpha

            # ratio test over rows whose pivot is distinguishable from zero
            flip = upper[entering]
            rows = np.flatnonzero(np.abs(alpha) > self.breakdown_tol)
            ratios = np.full(rows.size, np.inf)
            hits_upper = np.zeros(rows.size, dtype=bool)
            for pos, i in enumerate(rows):
                k = basis[i]
                if delta[i] > 0:
                    ratios[pos] = max(xB[i], 0.0) / delta[i]
                elif np.isfinite(upper[k]):
                    ratios[pos] = max(upper[k] - xB[i], 0.0) / -delta[i]
                    hits_upper[pos] = True

            t_min = float(np.min(ratios, initial=np.inf))
            if not np.isfinite(t_min) and not np.isfinite(flip):
                return LpStatus.UNBOUNDED, basis, at_upper, xB, iterations

            iterations += 1
            if flip <= t_min:
                # bound flip, basis unchanged
                at_upper[entering] = not at_upper[entering]
                step = flip
            else:
                ties = np.flatnonzero(ratios <= t_min + 1e-12)
                if bland:
                    pos = int(ties[np.argmin(basis[rows[ties]])])
                else:
                    pos = int(ties[np.argmax(np.abs(alpha[rows[ties]]))])
                leaving_row = int(rows[pos])
                if abs(alpha[leaving_row]) < self.pivot_tol and not bland:
                    self.logger.debug("Small pivot, falling back to Bland's rule")
                    bland = True
                    continue
                leaving = basis[leaving_row]
                basis[leaving_row] = entering
                in_basis[leaving] = False
                in_basis[entering] = True
                at_upper[leaving] = bool(hits_upper[pos])
                at_upper[entering] = False
                step = t_min

            if step <= 1e-12:
                degenerate_run += 1
                if not bland and degenerate_run > degenerate_limit:
                    self.logger.debug(f"Switching to Bland's rule after {degenerate_run} degenerate pivots")
                    bland = True
            else:
                degenerate_run = 0


def solve_lp(lp: LinearProgram, tol: Optional[float] = None) -> LpSolution:
    """Solve an LP; ``tol`` overrides the feasibility tolerance"""
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    return RevisedSimplex(feasibility_tol=tol).solve(lp)
