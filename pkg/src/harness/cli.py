"""
Command-line entry points, one subcommand per pipeline stage plus ``run`` for a full config.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

import pandas as pd

from config import settings
from src.benchmarks import InstanceSpec, generate_instance, sample_scenarios
from src.datagen import SurrogateDataset, generate_dataset
from src.embed import embed_model, export_embedded, load_network_file
from src.errors import ToolkitError
from src.nn import (KIND_ICNN, KIND_RELU, KINDS, TrainConfig, grid_search, init_models, preset_for, save_model,
                    train, training_summary)
from src.spmodel import load_problem, load_scenarios, save_problem, save_scenarios
from .pipeline import PipelineConfig, run_pipeline
from .report import (SolveReport, apply_gaps, check_summary, evaluate_true_objective, load_reports, reports_frame,
                     summary_statistics, write_reports)
from .solvers import solve_extensive_form, solve_surrogate

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None):
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def cmd_gen_instance(args) -> int:
    problem = generate_instance(InstanceSpec.from_name(args.name, args.seed))
    save_problem(args.out, problem)
    print(f"{problem.name}: {problem.n_first} first-stage, {problem.second_stage.n_y} second-stage variables -> {args.out}")
    return 0


def cmd_gen_scenarios(args) -> int:
    problem = load_problem(args.instance)
    scenarios = sample_scenarios(problem, args.count, args.seed, grid=args.grid)
    save_scenarios(args.out, scenarios)
    print(f"{len(scenarios)} scenarios for {problem.name} -> {args.out}")
    return 0


def cmd_gen_data(args) -> int:
    problem = load_problem(args.instance)
    pool = load_scenarios(args.pool, problem)
    dataset = generate_dataset(problem, pool, args.n, args.max_scen, args.seed, args.jobs)
    dataset.save(args.out)
    return 0


def cmd_train(args) -> int:
    problem = load_problem(args.instance)
    pool = load_scenarios(args.pool, problem)
    dataset = SurrogateDataset.load(args.data)
    kind = args.kind
    if args.preset:
        preset = preset_for(kind, problem.name)
        hidden, embed = preset.hidden_dims, preset.embed_dims
        config = preset.train_config(args.epochs, args.seed)
    else:
        hidden, embed = tuple(args.hidden), tuple(args.embed)
        config = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
                             l1_penalty=args.l1, l2_penalty=args.l2, optimizer=args.optimizer,
                             dropout_rate=args.dropout, seed=args.seed, negate_targets=args.negate)
    feature_dim = int(pool.features().shape[1])
    if args.grid_search:
        result, table = grid_search(kind, dataset, pool, config, embed_dims=embed)
        print(table.to_string(index=False))
    else:
        encoder, decoder = init_models(kind, problem.n_first, feature_dim, hidden, embed, args.seed)
        result = train(kind, encoder, decoder, dataset, config, pool)
    result.model.provenance.update({"instance": problem.name, "dataset": dataset.provenance})
    save_model(args.out, result.model)
    print(json.dumps(training_summary(result), indent=1))
    return 0


def cmd_embed(args) -> int:
    problem = load_problem(args.instance)
    scenarios = load_scenarios(args.scenarios, problem)
    model = load_network_file(args.model)
    embedded = embed_model(model, problem.first_stage, scenarios)
    export_embedded(embedded, args.out)
    print(json.dumps(embedded.size_summary.to_dict(), indent=1))
    return 0


def cmd_solve(args) -> int:
    problem = load_problem(args.instance)
    scenarios = load_scenarios(args.scenarios, problem)
    if args.method == "EF":
        result = solve_extensive_form(problem, scenarios, args.time_limit)
    else:
        if not args.model:
            raise ValueError(f"--model is required for method {args.method}")
        model = load_network_file(args.model)
        expected = KIND_ICNN if args.method == "ICNN" else KIND_RELU
        if model.kind != expected:
            raise ValueError(f"model {args.model} is a {model.kind} network, method {args.method} needs {expected}")
        result = solve_surrogate(model, problem, scenarios, args.time_limit)
    true_obj = float("nan") if result.x is None else evaluate_true_objective(problem, result.x, scenarios)
    report = SolveReport(problem=problem.name, n_scenarios=len(scenarios), scenario_seed=args.seed,
                         method=result.method, approx_objective=result.approx_objective, true_objective=true_obj,
                         wall_time_s=result.wall_time_s, status=result.status, size_summary=result.size_summary,
                         x=[] if result.x is None else [float(v) for v in result.x])
    write_reports([report], args.out)
    print(f"{result.method}: {result.status}, approx {result.approx_objective:.6g}, true {true_obj:.6g}, "
          f"{result.wall_time_s:.3f}s")
    return 0


def cmd_report(args) -> int:
    reports: List[SolveReport] = []
    for path in args.inputs:
        reports.extend(load_reports(path))
    apply_gaps(reports)
    paths = write_reports(reports, args.out)
    print(f"{len(reports)} reports -> {paths['csv']}")
    return 0


def _report_check(summary: pd.DataFrame, args) -> int:
    failures = check_summary(summary, args.max_gap, args.max_slowdown)
    for failure in failures:
        logger.error(failure)
    print(f"check: {len(failures)} failure(s) over {len(summary)} summary rows")
    return 1 if failures else 0


def cmd_check(args) -> int:
    return _report_check(pd.read_csv(args.summary), args)


def cmd_run(args) -> int:
    config = PipelineConfig.from_file(args.config)
    reports = run_pipeline(config)
    for r in reports:
        print(f"{r.problem} s={r.n_scenarios} seed={r.scenario_seed} {r.method}: true {r.true_objective:.6g}, "
              f"gap {r.gap_vs_baseline_pct:.3f}%, {r.wall_time_s:.3f}s")
    if args.check:
        return _report_check(summary_statistics(reports_frame(reports)), args)
    return 0


def _add_check_options(p: argparse.ArgumentParser):
    p.add_argument("--max-gap", type=float, default=10.0, help="largest accepted mean gap in percent")
    p.add_argument("--max-slowdown", type=float, default=2.0, help="largest accepted ICNN/ReLU median time ratio")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surrogate-2sp", description="Neural surrogates for two-stage stochastic programs")
    parser.add_argument("--log-level", default=None, help="override SURROGATE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instance", help="generate a benchmark instance")
    p.add_argument("--name", required=True, help="CFLP_n_m, SSLP_n_m or INVP_{B,I}_{E,H}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("gen-scenarios", help="sample a scenario set for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", action="store_true", help="INVP only: equally spaced grid, count must be a square")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_scenarios)

    p = sub.add_parser("gen-data", help="generate the supervised dataset")
    p.add_argument("--instance", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--n", type=int, default=settings.n_samples)
    p.add_argument("--max-scen", type=int, default=settings.max_scenarios)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=settings.n_jobs)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train an ICNN or ReLU surrogate")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--hidden", type=int, nargs="+", default=[64])
    p.add_argument("--embed", type=int, nargs=3, default=[64, 32, 16])
    p.add_argument("--epochs", type=int, default=settings.epochs)
    p.add_argument("--batch-size", type=int, default=settings.batch_size)
    p.add_argument("--lr", type=float, default=settings.learning_rate)
    p.add_argument("--l1", type=float, default=0.0)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--optimizer", default="adam")
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--negate", action="store_true", help="train on negated labels (concavity check)")
    p.add_argument("--preset", action="store_true", help="use the stored best configuration for the instance")
    p.add_argument("--grid-search", action="store_true", help="select width, lr and batch size on validation MAE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("embed", help="write the LP/MILP reformulation of a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("solve", help="solve one instance by one method and evaluate the decision")
    p.add_argument("--method", choices=("EF", "ICNN", "NN"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--model")
    p.add_argument("--seed", type=int, default=0, help="scenario seed recorded in the report")
    p.add_argument("--time-limit", type=float, default=settings.ef_time_limit_s)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("report", help="merge report files and compute gaps against EF")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("check", help="check a summary.csv against the gap and solve-time targets")
    p.add_argument("--summary", required=True)
    _add_check_options(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run the whole pipeline from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--check", action="store_true", help="exit 1 if the summary misses the targets")
    _add_check_options(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ToolkitError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
