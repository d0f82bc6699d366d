import logging
from typing import Optional

import numpy as np

from src.errors import InfeasibleFirstStage
from src.lp import EQ, GE, LE
from .problem import FirstStage

logger = logging.getLogger(__name__)


class FirstStageSampler:
    """
    Draws first-stage decisions uniformly from the box, then makes them feasible:
    equality rows by alternating projection onto {Ax = b} and the box, binary
    vectors by greedy repair of violated inequality rows, anything else by rejection.
    Infinite bounds are replaced by a window of width ``unbounded_span``.
    """

    def __init__(self, first_stage: FirstStage, max_tries: int = 1000, unbounded_span: float = 10.0,
                 projection_rounds: int = 50):
        self.first_stage = first_stage
        self.max_tries = max_tries
        self.projection_rounds = projection_rounds
        self.logger = logging.getLogger(__name__)

        lo, hi = first_stage.lower, first_stage.upper
        self.box_lower = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi - unbounded_span, 0.0))
        self.box_upper = np.where(np.isfinite(hi), hi, self.box_lower + unbounded_span)
        self.integer_idx = np.array(sorted(first_stage.integer_vars), dtype=int)
        self.continuous_idx = np.setdiff1d(np.arange(first_stage.n), self.integer_idx)
        self.binary = bool(self.integer_idx.size) and np.all(self.box_lower[self.integer_idx] == 0.0) \
            and np.all(self.box_upper[self.integer_idx] == 1.0)

        rows = np.array([s == EQ for s in first_stage.senses], dtype=bool)
        self._eq_rows = np.flatnonzero(rows)
        self._A_eq = None
        if self._eq_rows.size and self.continuous_idx.size:
            self._A_eq = first_stage.A[self._eq_rows][:, self.continuous_idx].toarray()
            self._A_eq_pinv = np.linalg.pinv(self._A_eq)

    def _draw_box(self, rng: np.random.Generator, relaxed: bool) -> np.ndarray:
        x = rng.uniform(self.box_lower, self.box_upper)
        if not relaxed and self.integer_idx.size:
            lo = np.ceil(self.box_lower[self.integer_idx])
            hi = np.floor(self.box_upper[self.integer_idx])
            x[self.integer_idx] = rng.integers(lo.astype(np.int64), hi.astype(np.int64) + 1)
        return x

    def _project(self, x: np.ndarray) -> np.ndarray:
        """Alternate between the affine set of equality rows and the box on the continuous part"""
        if self._A_eq is None:
            return x
        fs = self.first_stage
        cont = self.continuous_idx
        A_rows = fs.A[self._eq_rows]
        b_rows = fs.b[self._eq_rows]
        for _ in range(self.projection_rounds):
            x[cont] -= self._A_eq_pinv @ (A_rows @ x - b_rows)
            x[cont] = np.clip(x[cont], self.box_lower[cont], self.box_upper[cont])
            if np.max(np.abs(A_rows @ x - b_rows), initial=0.0) <= 1e-9:
                break
        return x

    def _repair_binary(self, x: np.ndarray) -> np.ndarray:
        """Flip binaries one at a time until inequality rows hold or no flip helps"""
        fs = self.first_stage
        A = fs.A.toarray()
        for _ in range(self.integer_idx.size + 1):
            act = A @ x
            violated = None
            for i, s in enumerate(fs.senses):
                if s == LE and act[i] > fs.b[i] + 1e-9:
                    violated = (i, 1.0)
                    break
                if s == GE and act[i] < fs.b[i] - 1e-9:
                    violated = (i, -1.0)
                    break
            if violated is None:
                return x
            i, direction = violated
            # for '<=' turn off the ones with the largest positive coefficient, for '>=' turn on
            want = 1.0 if direction > 0 else 0.0
            candidates = [j for j in self.integer_idx if x[j] == want and A[i, j] > 0]
            if not candidates:
                return x
            j = max(candidates, key=lambda k: (abs(A[i, k]), -k))
            x[j] = 1.0 - want
        return x

    def sample(self, rng: np.random.Generator, relaxed: bool = False) -> np.ndarray:
        fs = self.first_stage
        for _ in range(self.max_tries):
            x = self._draw_box(rng, relaxed)
            if fs.n_rows:
                x = self._project(x)
                if self.binary and not relaxed:
                    x = self._repair_binary(x)
            if fs.is_feasible(x, tol=1e-7, check_integrality=not relaxed):
                return x
        raise InfeasibleFirstStage(f"no feasible first-stage point after {self.max_tries} draws")

    def sample_many(self, rng: np.random.Generator, count: int, relaxed: bool = False) -> np.ndarray:
        return np.vstack([self.sample(rng, relaxed) for _ in range(count)]) if count else np.zeros((0, self.first_stage.n))


def sample_first_stage(first_stage: FirstStage, rng: np.random.Generator, relaxed: bool = False,
                       sampler: Optional[FirstStageSampler] = None) -> np.ndarray:
    return (sampler or FirstStageSampler(first_stage)).sample(rng, relaxed)
