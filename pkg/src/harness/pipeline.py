import json
import logging
import math
import subprocess
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from config import settings
from src.benchmarks import InstanceSpec, generate_instance, sample_scenarios
from src.datagen import SurrogateDataset, generate_dataset
from src.embed import load_network_file
from src.errors import PipelineStageError, ToolkitError
from src.nn import (KIND_ICNN, KIND_RELU, SurrogateModel, TrainConfig, init_models, model_digest,
                    preset_for, save_model, train)
from src.spmodel import ScenarioSet, TwoStageProblem, save_problem, save_scenarios
from .report import SolveReport, apply_gaps, evaluate_true_objective, write_reports
from .solvers import UNMAPPED_SOLVER_PARAMS, MethodResult, solve_extensive_form, solve_surrogate, time_to_match

Method = Literal["EF", "ICNN", "NN"]
METHOD_KINDS = {"ICNN": KIND_ICNN, "NN": KIND_RELU}


class InstanceConfig(BaseModel):
    name: str
    seed: int = 0


class ScenarioConfig(BaseModel):
    counts: List[int] = Field(default_factory=lambda: [4])
    seeds: List[int] = Field(default_factory=lambda: [0])
    grid: bool = False

    @field_validator("counts")
    @classmethod
    def _positive(cls, v: List[int]) -> List[int]:
        if not v or min(v) < 1:
            raise ValueError("scenario counts must be positive")
        return v


class DataConfig(BaseModel):
    pool_size: int = 100
    pool_seed: int = 1
    n_samples: int = Field(default_factory=lambda: settings.n_samples)
    max_scenarios: int = Field(default_factory=lambda: settings.max_scenarios)
    seed: int = 0
    n_jobs: int = 1
    path: Optional[str] = None


class TrainingConfig(BaseModel):
    use_presets: bool = False
    hidden_dims: List[int] = Field(default_factory=lambda: [64])
    embed_dims: List[int] = Field(default_factory=lambda: [64, 32, 16])
    epochs: int = Field(default_factory=lambda: settings.epochs)
    batch_size: int = Field(default_factory=lambda: settings.batch_size)
    learning_rate: float = Field(default_factory=lambda: settings.learning_rate)
    l1_penalty: float = 0.0
    l2_penalty: float = 0.0
    optimizer: Literal["adam", "sgd", "rmsprop", "adagrad"] = "adam"
    dropout_rate: float = 0.0
    seed: int = 0
    model_paths: Dict[str, str] = Field(default_factory=dict)

    @field_validator("embed_dims")
    @classmethod
    def _three_widths(cls, v: List[int]) -> List[int]:
        if len(v) != 3:
            raise ValueError("embed_dims needs three widths")
        return v


class PipelineConfig(BaseModel):
    instance: InstanceConfig
    methods: List[Method] = Field(default_factory=lambda: ["EF", "ICNN", "NN"])
    scenarios: ScenarioConfig = Field(default_factory=ScenarioConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    ef_time_limit_s: float = Field(default_factory=lambda: settings.ef_time_limit_s)
    surrogate_time_limit_s: float = Field(default_factory=lambda: settings.ef_time_limit_s)
    time_to_match: bool = False
    output_dir: str = Field(default_factory=lambda: settings.artifacts_dir)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "PipelineConfig":
        return cls.model_validate_json(Path(path).read_text())


def git_commit() -> str:
    try:
        result = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=5,
                                cwd=Path(__file__).resolve().parent)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() if result.returncode == 0 and result.stdout.strip() else "unknown"


class ExperimentPipeline:
    """gen -> data -> train -> embed/solve -> evaluate, with every artifact written under output_dir/instance"""

    def __init__(self, config: PipelineConfig, show_progress: Optional[bool] = None):
        self.config = config
        self.show_progress = settings.show_progress if show_progress is None else show_progress
        self.out = Path(config.output_dir) / config.instance.name
        self.logger = logging.getLogger(__name__)
        self._provenance = self._base_provenance()

    def run(self) -> List[SolveReport]:
        cfg = self.config
        self.out.mkdir(parents=True, exist_ok=True)
        problem = self._stage("gen-instance", self.out / "instance.json", self._generate)
        surrogate_methods = [m for m in cfg.methods if m in METHOD_KINDS]
        models: Dict[str, Tuple[SurrogateModel, Path, str]] = {}
        if surrogate_methods:
            pool = self._stage("gen-scenarios", self.out / "pool.json", lambda: self._pool(problem))
            dataset = None
            for method in surrogate_methods:
                if method in cfg.training.model_paths:
                    path = Path(cfg.training.model_paths[method])
                else:
                    if dataset is None:
                        dataset = self._stage("gen-data", self.out / "dataset.jsonl",
                                              lambda: self._dataset(problem, pool))
                    path = self.out / f"model_{method}.json"
                    self._stage("train", path, lambda: self._train(method, problem, pool, dataset, path))
                model = self._stage("embed", path, lambda: load_network_file(path))
                models[method] = (model, path, model_digest(path))

        reports: List[SolveReport] = []
        for count in cfg.scenarios.counts:
            for seed in cfg.scenarios.seeds:
                set_path = self.out / "scenarios" / f"{problem.name}_{count}_{seed}.json"
                scenarios = self._stage("gen-scenarios", set_path,
                                        lambda: self._scenarios(problem, count, seed, set_path))
                reports.extend(self._stage("solve", set_path,
                                           lambda: self._solve_cell(problem, scenarios, seed, models)))
        apply_gaps(reports)
        self._stage("report", self.out / "reports.csv", lambda: write_reports(reports, self.out))
        return reports

    def _stage(self, name: str, artifact: Optional[Path], fn: Callable[[], Any]) -> Any:
        try:
            return fn()
        except PipelineStageError:
            raise
        except (ToolkitError, ValueError, KeyError, OSError) as e:
            self.logger.error(f"Stage '{name}' failed on {artifact}: {e}")
            raise PipelineStageError(name, str(artifact) if artifact else None, e) from e

    def _generate(self) -> TwoStageProblem:
        spec = InstanceSpec.from_name(self.config.instance.name, self.config.instance.seed)
        problem = generate_instance(spec)
        save_problem(self.out / "instance.json", problem)
        return problem

    def _pool(self, problem: TwoStageProblem) -> ScenarioSet:
        pool = sample_scenarios(problem, self.config.data.pool_size, self.config.data.pool_seed)
        save_scenarios(self.out / "pool.json", pool)
        return pool

    def _scenarios(self, problem: TwoStageProblem, count: int, seed: int, path: Path) -> ScenarioSet:
        scenarios = sample_scenarios(problem, count, seed, grid=self.config.scenarios.grid)
        path.parent.mkdir(parents=True, exist_ok=True)
        save_scenarios(path, scenarios)
        return scenarios

    def _dataset(self, problem: TwoStageProblem, pool: ScenarioSet) -> SurrogateDataset:
        dc = self.config.data
        if dc.path:
            dataset = SurrogateDataset.load(dc.path)
            dataset.validate(pool)
            return dataset
        dataset = generate_dataset(problem, pool, dc.n_samples, dc.max_scenarios, dc.seed, dc.n_jobs,
                                   self.show_progress)
        dataset.save(self.out / "dataset.jsonl")
        return dataset

    def _train(self, method: str, problem: TwoStageProblem, pool: ScenarioSet, dataset: SurrogateDataset,
               path: Path) -> Path:
        tc = self.config.training
        kind = METHOD_KINDS[method]
        if tc.use_presets:
            preset = preset_for(kind, problem.name)
            hidden, embed = preset.hidden_dims, preset.embed_dims
            train_config = preset.train_config(tc.epochs, tc.seed)
        else:
            hidden, embed = tuple(tc.hidden_dims), tuple(tc.embed_dims)
            train_config = TrainConfig(epochs=tc.epochs, batch_size=tc.batch_size, learning_rate=tc.learning_rate,
                                       l1_penalty=tc.l1_penalty, l2_penalty=tc.l2_penalty, optimizer=tc.optimizer,
                                       dropout_rate=tc.dropout_rate, seed=tc.seed)
        feature_dim = int(pool.features().shape[1])
        encoder, decoder = init_models(kind, problem.n_first, feature_dim, hidden, embed, tc.seed)
        result = train(kind, encoder, decoder, dataset, train_config, pool, self.show_progress)
        result.model.provenance.update({"instance": problem.name, "dataset": dataset.provenance,
                                        "val_mae": result.val_mae, "train_mse": result.train_mse})
        return save_model(path, result.model)

    def _solve_cell(self, problem: TwoStageProblem, scenarios: ScenarioSet, seed: int,
                    models: Dict[str, Tuple[SurrogateModel, Path, str]]) -> List[SolveReport]:
        cfg = self.config
        results: List[Tuple[MethodResult, Optional[str]]] = []
        ef_log = []
        if "EF" in cfg.methods:
            ef = solve_extensive_form(problem, scenarios, cfg.ef_time_limit_s)
            ef_log = ef.node_log
            results.append((ef, None))
        for method, (model, path, digest) in models.items():
            if model_digest(path) != digest:
                raise PipelineStageError("solve", str(path), ValueError("model file changed during the sweep"))
            results.append((solve_surrogate(model, problem, scenarios, cfg.surrogate_time_limit_s), digest))

        reports = []
        for result, digest in results:
            true_obj = math.nan
            if result.x is not None:
                true_obj = evaluate_true_objective(problem, result.x, scenarios)
            match = None
            if cfg.time_to_match and result.method != "EF" and result.x is not None:
                match = time_to_match(ef_log, true_obj)
            reports.append(SolveReport(
                problem=problem.name,
                n_scenarios=len(scenarios),
                scenario_seed=seed,
                method=result.method,
                approx_objective=result.approx_objective,
                true_objective=true_obj,
                wall_time_s=result.wall_time_s,
                status=result.status,
                ef_time_to_match_s=match,
                size_summary=result.size_summary,
                x=[] if result.x is None else [float(v) for v in result.x],
                model_digest=digest,
                provenance=dict(self._provenance),
            ))
        return reports

    def _base_provenance(self) -> Dict[str, Any]:
        cfg = self.config
        return {
            "instance_seed": cfg.instance.seed,
            "pool_seed": cfg.data.pool_seed,
            "data_seed": cfg.data.seed,
            "train_seed": cfg.training.seed,
            "commit": git_commit(),
            "feasibility_tol": settings.feasibility_tol,
            "optimality_tol": settings.optimality_tol,
            "integrality_tol": settings.integrality_tol,
            "mip_gap_tol": settings.mip_gap_tol,
            "ef_time_limit_s": cfg.ef_time_limit_s,
            "unmapped_solver_params": json.dumps(UNMAPPED_SOLVER_PARAMS, sort_keys=True),
        }


def run_pipeline(config_file: Union[str, Path, PipelineConfig], show_progress: Optional[bool] = None) -> List[SolveReport]:
    config = config_file if isinstance(config_file, PipelineConfig) else PipelineConfig.from_file(config_file)
    return ExperimentPipeline(config, show_progress).run()
