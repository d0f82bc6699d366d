import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from config import settings
from src.errors import RecourseInfeasible
from src.spmodel import FirstStageSampler, ScenarioSet, TwoStageProblem, evaluate_recourse
from src.utils import substream
from .dataset import DataRecord, SurrogateDataset

CHUNK_SIZE = 25


class DatasetGenerator:
    """
    Builds (x, scenario subset, mean recourse) records. Record i draws from its
    own random substream, so the dataset does not depend on n_jobs or on how
    records are grouped into worker chunks.
    """

    def __init__(self, problem: TwoStageProblem, pool: ScenarioSet, max_scenarios: Optional[int] = None,
                 seed: int = 0, n_jobs: Optional[int] = None, show_progress: Optional[bool] = None):
        self.problem = problem
        self.pool = pool
        self.max_scenarios = settings.max_scenarios if max_scenarios is None else max_scenarios
        self.seed = seed
        self.n_jobs = settings.n_jobs if n_jobs is None else n_jobs
        self.show_progress = settings.show_progress if show_progress is None else show_progress
        self.logger = logging.getLogger(__name__)
        if not 1 <= self.max_scenarios <= len(pool):
            raise ValueError(f"max_scenarios must lie in [1, {len(pool)}] for pool '{pool.set_id}', "
                             f"got {self.max_scenarios}")
        if self.n_jobs < 1:
            raise ValueError(f"n_jobs must be at least 1, got {self.n_jobs}")
        self._sampler = FirstStageSampler(problem.first_stage)
        self._ids = pool.ids

    @property
    def stream_keys(self) -> tuple:
        return ("datagen", self.problem.name, self.seed)

    def record(self, index: int) -> DataRecord:
        rng = substream(self.stream_keys, index)
        x = self._sampler.sample(rng)
        k = int(rng.integers(1, self.max_scenarios + 1))
        chosen = rng.choice(len(self._ids), size=k, replace=False)
        scenario_ids = [self._ids[j] for j in chosen]
        total = 0.0
        for sid in scenario_ids:
            total += evaluate_recourse(self.problem, x, self.pool.by_id(sid))
        return DataRecord(x=x, scenario_ids=scenario_ids, label=total / k)

    def records(self, indices: Sequence[int]) -> List[DataRecord]:
        return [self.record(i) for i in indices]

    def generate(self, n_samples: Optional[int] = None) -> SurrogateDataset:
        n_samples = settings.n_samples if n_samples is None else n_samples
        if n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        self.logger.info(f"Generating {n_samples} records for {self.problem.name} from pool "
                         f"'{self.pool.set_id}' ({len(self.pool)} scenarios, up to {self.max_scenarios} "
                         f"per record, {self.n_jobs} job(s))")
        try:
            if self.n_jobs > 1:
                records = self._generate_parallel(n_samples)
            else:
                records = [self.record(i) for i in tqdm(range(n_samples), desc="records",
                                                        disable=not self.show_progress)]
        except RecourseInfeasible as e:
            self.logger.error(f"Recourse infeasible for scenario {e.scenario_id} at x={e.x}")
            raise
        provenance = {
            "instance": self.problem.name,
            "pool": self.pool.set_id,
            "pool_size": len(self.pool),
            "seed": self.seed,
            "n_samples": n_samples,
            "max_scenarios_per_sample": self.max_scenarios,
        }
        return SurrogateDataset(records=records, provenance=provenance)

    def _generate_parallel(self, n_samples: int) -> List[DataRecord]:
        chunks = [list(range(s, min(s + CHUNK_SIZE, n_samples))) for s in range(0, n_samples, CHUNK_SIZE)]
        records: List[DataRecord] = []
        with ProcessPoolExecutor(max_workers=self.n_jobs) as pool:
            jobs = pool.map(_chunk_worker, [(self.problem, self.pool, self.max_scenarios, self.seed, c)
                                            for c in chunks])
            for part in tqdm(jobs, total=len(chunks), desc="record chunks", disable=not self.show_progress):
                records.extend(part)
        return records


def _chunk_worker(args) -> List[DataRecord]:
    problem, pool, max_scenarios, seed, indices = args
    generator = DatasetGenerator(problem, pool, max_scenarios, seed, n_jobs=1, show_progress=False)
    return generator.records(indices)


def generate_dataset(problem: TwoStageProblem, pool: ScenarioSet, n_samples: Optional[int] = None,
                     max_scenarios: Optional[int] = None, seed: int = 0,
                     n_jobs: Optional[int] = None, show_progress: Optional[bool] = None) -> SurrogateDataset:
    return DatasetGenerator(problem, pool, max_scenarios, seed, n_jobs, show_progress).generate(n_samples)


def relabel(problem: TwoStageProblem, pool: ScenarioSet, record: DataRecord) -> float:
    """Mean recourse over the record's stored scenario ids, recomputed from scratch"""
    values = np.array([evaluate_recourse(problem, record.x, pool.by_id(sid)) for sid in record.scenario_ids])
    return float(values.mean())
