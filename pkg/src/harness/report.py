import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.errors import BaselineZero, InfeasibleFirstStage
from src.spmodel import ScenarioSet, TwoStageProblem, expected_recourse

logger = logging.getLogger(__name__)

METHODS = ("EF", "ICNN", "NN")
BASELINE_METHOD = "EF"
INTEGRALITY_TOL = 1e-6


@dataclass
class SolveReport:
    """One (instance, scenario set, method) cell of the results tables"""
    problem: str
    n_scenarios: int
    scenario_seed: int
    method: str
    approx_objective: float
    true_objective: float
    wall_time_s: float
    status: str
    gap_vs_baseline_pct: float = math.nan
    ef_time_to_match_s: Optional[float] = None
    size_summary: Dict[str, Any] = field(default_factory=dict)
    x: List[float] = field(default_factory=list)
    model_digest: Optional[str] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row = {k: v for k, v in asdict(self).items() if k not in ("size_summary", "provenance", "x")}
        row.update({f"size_{k}": v for k, v in self.size_summary.items() if k != "method"})
        row.update({k: v for k, v in self.provenance.items() if not isinstance(v, (dict, list))})
        return row


def compute_gap(method_true: float, baseline: float) -> float:
    """Percent difference to the baseline; negative means better when minimizing"""
    if baseline == 0:
        raise BaselineZero("relative gap is undefined for a zero baseline objective")
    return 100.0 * (method_true - baseline) / abs(baseline)


def round_first_stage(problem: TwoStageProblem, x_star, tol: float = INTEGRALITY_TOL) -> np.ndarray:
    fs = problem.first_stage
    x = np.asarray(x_star, dtype=float).copy()
    if x.size != fs.n:
        raise InfeasibleFirstStage(f"x has length {x.size}, first stage has {fs.n}")
    if fs.integer_vars:
        idx = np.array(sorted(fs.integer_vars))
        rounded = np.round(x[idx])
        off = np.abs(x[idx] - rounded)
        if np.any(off > tol):
            raise InfeasibleFirstStage(f"integer components off by up to {off.max():.3g} from the nearest integer")
        x[idx] = rounded
    # tiny bound drift from the LP solver is clipped
    x = np.clip(x, fs.lower, fs.upper)
    return x


def evaluate_true_objective(problem: TwoStageProblem, x_star, full_scenarios: ScenarioSet) -> float:
    """c^T x + expected recourse over the full scenario set, after rounding integer components"""
    x = round_first_stage(problem, x_star)
    if not problem.first_stage.is_feasible(x, tol=INTEGRALITY_TOL):
        raise InfeasibleFirstStage(f"first-stage point violates the constraints of {problem.name}")
    return float(problem.first_stage.c @ x) + expected_recourse(problem, x, full_scenarios)


def apply_gaps(reports: Sequence[SolveReport], baseline_method: str = BASELINE_METHOD) -> None:
    """Fill gap_vs_baseline_pct for every report that has a baseline run on the same scenario set"""
    baselines = {(r.problem, r.n_scenarios, r.scenario_seed): r.true_objective
                 for r in reports if r.method == baseline_method}
    for r in reports:
        base = baselines.get((r.problem, r.n_scenarios, r.scenario_seed))
        if base is None:
            continue
        try:
            r.gap_vs_baseline_pct = compute_gap(r.true_objective, base)
        except BaselineZero:
            logger.warning(f"{r.problem} s={r.n_scenarios}: baseline objective is 0, gap left undefined")


def reports_frame(reports: Sequence[SolveReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in reports])


def summary_statistics(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of gaps and times per (problem, scenario count, method), plus median time"""
    grouped = frame.groupby(["problem", "n_scenarios", "method"], sort=True)
    summary = grouped.agg(
        runs=("wall_time_s", "size"),
        gap_mean=("gap_vs_baseline_pct", "mean"),
        gap_std=("gap_vs_baseline_pct", "std"),
        time_mean=("wall_time_s", "mean"),
        time_std=("wall_time_s", "std"),
        time_median=("wall_time_s", "median"),
        true_objective_mean=("true_objective", "mean"),
    )
    return summary.reset_index()


def check_summary(summary: pd.DataFrame, max_gap_pct: float = 10.0, max_slowdown: float = 2.0,
                  time_floor_s: float = 0.05) -> List[str]:
    """
    Failures of a summary table against the benchmark targets: every surrogate cell has a finite
    mean gap of at most max_gap_pct, and wherever both surrogates ran, the ICNN median solve time
    is within max_slowdown times the ReLU one. time_floor_s absorbs timer noise on tiny solves.
    """
    failures: List[str] = []
    surrogate = summary[summary["method"] != BASELINE_METHOD]
    if surrogate.empty:
        return ["summary holds no surrogate rows"]
    for row in surrogate.itertuples(index=False):
        cell = f"{row.problem} s={row.n_scenarios} {row.method}"
        if not math.isfinite(row.gap_mean):
            failures.append(f"{cell}: gap is undefined")
        elif row.gap_mean > max_gap_pct:
            failures.append(f"{cell}: mean gap {row.gap_mean:.3f}% exceeds {max_gap_pct}%")
    times = surrogate.pivot_table(index=["problem", "n_scenarios"], columns="method", values="time_median")
    if {"ICNN", "NN"} <= set(times.columns):
        for (problem, n), icnn, relu in zip(times.index, times["ICNN"], times["NN"]):
            if math.isfinite(icnn) and math.isfinite(relu) and icnn > max_slowdown * relu + time_floor_s:
                failures.append(f"{problem} s={n}: ICNN median {icnn:.3f}s is more than {max_slowdown}x "
                                f"the ReLU median {relu:.3f}s")
    return failures


def write_reports(reports: Sequence[SolveReport], out_dir: Union[str, Path]) -> Dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frame = reports_frame(reports)
    paths = {"csv": out / "reports.csv", "json": out / "reports.json", "summary": out / "summary.csv"}
    frame.to_csv(paths["csv"], index=False)
    paths["json"].write_text(json.dumps([asdict(r) for r in reports], indent=1, default=_json_default))
    if not frame.empty:
        summary_statistics(frame).to_csv(paths["summary"], index=False)
    logger.info(f"Wrote {len(reports)} reports to {out}")
    return paths


def load_reports(path: Union[str, Path]) -> List[SolveReport]:
    raw = json.loads(Path(path).read_text())
    return [SolveReport(**r) for r in raw]


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")
