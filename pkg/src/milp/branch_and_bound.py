import heapq
import logging
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from config import settings
from src.errors import NoIncumbentAtLimit, UnboundedRelaxation
from src.lp import MAXIMIZE, LinearProgram, LpStatus, RevisedSimplex
from .program import MilpSolution, MilpStatus, MixedIntegerProgram, NodeRecord, SolverConfig


@dataclass
class _Node:
    node_id: int
    depth: int
    parent_bound: float
    lower: np.ndarray
    upper: np.ndarray


def relative_gap(objective: float, bound: float) -> float:
    return max(0.0, (objective - bound) / max(abs(objective), 1e-10))


class BranchAndBound:
    """
    LP-based branch and bound. Best-bound node selection keyed on the parent's
    relaxation value (ties by node id), most-fractional branching with ties broken
    by lowest index. No cuts, no primal heuristics, no presolve.
    """

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig(
            gap_tol=settings.mip_gap_tol,
            node_limit=settings.node_limit,
            time_limit_s=settings.mip_time_limit_s,
            integrality_tol=settings.integrality_tol,
        )
        self.simplex = RevisedSimplex()
        self.logger = logging.getLogger(__name__)

    def solve(self, mip: Union[MixedIntegerProgram, LinearProgram]) -> MilpSolution:
        if isinstance(mip, LinearProgram):
            mip = MixedIntegerProgram(base=mip)
        cfg = self.config
        base = mip.base
        # search minimizes; maximization is handled by negating reported values
        sign = -1.0 if base.sense == MAXIMIZE else 1.0
        integer_idx = np.array(sorted(mip.integer_vars), dtype=int)

        lower = base.lower.copy()
        upper = base.upper.copy()
        if integer_idx.size:
            lower[integer_idx] = np.ceil(lower[integer_idx] - cfg.integrality_tol)
            upper[integer_idx] = np.floor(upper[integer_idx] + cfg.integrality_tol)
        if np.any(lower > upper):
            return self._finish(MilpStatus.INFEASIBLE, None, math.inf, math.inf, 0, [], sign, 0.0)

        start = time.perf_counter()
        heap = []
        next_id = 0
        heapq.heappush(heap, (-math.inf, next_id, _Node(next_id, 0, -math.inf, lower, upper)))
        next_id += 1

        incumbent: Optional[np.ndarray] = None
        incumbent_obj = math.inf
        node_count = 0
        node_log: List[NodeRecord] = []
        stopped = None

        while heap:
            bound = heap[0][0]
            if incumbent is not None and self._within_gap(incumbent_obj, bound):
                break
            if node_count >= cfg.node_limit:
                stopped = MilpStatus.FEASIBLE
                break
            if time.perf_counter() - start > cfg.time_limit_s:
                stopped = MilpStatus.TIME_LIMIT
                break

            _, _, node = heapq.heappop(heap)
            if node.parent_bound >= incumbent_obj - self._prune_tol(incumbent_obj):
                continue

            lp = base.with_bounds(node.lower, node.upper)
            sol = self.simplex.solve(lp)
            node_count += 1

            if sol.status == LpStatus.UNBOUNDED:
                if node.depth == 0:
                    raise UnboundedRelaxation("LP relaxation at the root is unbounded")
                continue
            if sol.status == LpStatus.INFEASIBLE:
                node_log.append(NodeRecord(node.node_id, node.depth, math.inf, sign * incumbent_obj,
                                           time.perf_counter() - start))
                continue

            value = sign * sol.objective
            x = sol.primal
            if value < incumbent_obj - self._prune_tol(incumbent_obj):
                branch_var = self._pick_branch(x, integer_idx)
                if branch_var < 0:
                    x = x.copy()
                    if integer_idx.size:
                        x[integer_idx] = np.round(x[integer_idx])
                    incumbent = x
                    incumbent_obj = sign * base.objective_value(x)
                    self.logger.debug(f"Node {node.node_id}: new incumbent {sign * incumbent_obj:.6g}")
                else:
                    v = x[branch_var]
                    down_upper = node.upper.copy()
                    down_upper[branch_var] = math.floor(v)
                    up_lower = node.lower.copy()
                    up_lower[branch_var] = math.ceil(v)
                    for lo, hi in ((node.lower, down_upper), (up_lower, node.upper)):
                        child = _Node(next_id, node.depth + 1, value, lo, hi)
                        heapq.heappush(heap, (value, next_id, child))
                        next_id += 1

            node_log.append(NodeRecord(node.node_id, node.depth, sign * value, sign * incumbent_obj,
                                       time.perf_counter() - start))

        elapsed = time.perf_counter() - start
        open_bound = heap[0][0] if heap else math.inf
        if stopped is not None and incumbent is None:
            raise NoIncumbentAtLimit(
                f"stopped after {node_count} nodes ({elapsed:.2f}s) without an integer-feasible point",
                node_count=node_count,
                bound=sign * open_bound,
            )
        if incumbent is None:
            status = MilpStatus.INFEASIBLE
        else:
            status = stopped or MilpStatus.OPTIMAL
        best_bound = min(incumbent_obj, open_bound)
        self.logger.info(
            f"Branch and bound finished: {status.value}, {node_count} nodes, {elapsed:.3f}s"
        )
        result = self._finish(status, incumbent, incumbent_obj, best_bound, node_count, node_log, sign, elapsed)
        if cfg.node_log_path:
            write_node_log(cfg.node_log_path, node_log)
        return result

    def _within_gap(self, objective: float, bound: float) -> bool:
        if bound >= objective:
            return True
        return relative_gap(objective, bound) <= self.config.gap_tol

    def _prune_tol(self, objective: float) -> float:
        if not math.isfinite(objective):
            return 0.0
        return max(self.config.gap_tol * abs(objective), 1e-9)

    def _pick_branch(self, x: np.ndarray, integer_idx: np.ndarray) -> int:
        if integer_idx.size == 0:
            return -1
        values = x[integer_idx]
        frac = np.abs(values - np.round(values))
        if np.max(frac) <= self.config.integrality_tol:
            return -1
        # argmax returns the lowest position among equal fractionalities
        return int(integer_idx[int(np.argmax(frac))])

    @staticmethod
    def _finish(status, incumbent, objective, bound, node_count, node_log, sign, elapsed) -> MilpSolution:
        if incumbent is None:
            return MilpSolution(status=status, incumbent=None, objective=math.nan, bound=math.nan,
                                gap=math.inf, node_count=node_count, node_log=node_log, wall_time_s=elapsed)
        gap = relative_gap(objective, bound)
        return MilpSolution(
            status=status,
            incumbent=incumbent,
            objective=sign * objective,
            bound=sign * bound,
            gap=gap,
            node_count=node_count,
            node_log=node_log,
            wall_time_s=elapsed,
        )


def write_node_log(path: str, node_log: List[NodeRecord]):
    df = pd.DataFrame([vars(r) for r in node_log], columns=["node_id", "depth", "bound", "incumbent", "time_s"])
    df.to_csv(path, index=False)


def solve_milp(mip: Union[MixedIntegerProgram, LinearProgram], config: Optional[SolverConfig] = None) -> MilpSolution:
    return BranchAndBound(config).solve(mip)
