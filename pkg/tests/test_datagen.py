import numpy as np
import pytest
from scipy import stats

from src.benchmarks import InstanceSpec, generate_instance, sample_scenarios
from src.datagen import DataRecord, DatasetGenerator, SurrogateDataset, generate_dataset, relabel
from src.errors import FormatError
from src.spmodel import evaluate_recourse
from tests.helpers import toy_continuous_problem, toy_scenarios


@pytest.fixture(scope="module")
def cflp():
    problem = generate_instance(InstanceSpec.from_name("CFLP_3_4", seed=0))
    return problem, sample_scenarios(problem, 12, seed=1)


@pytest.fixture(scope="module")
def toy():
    problem = toy_continuous_problem()
    rhs = [(float(a), float(b)) for a in range(1, 5) for b in range(2, 6)]
    return problem, toy_scenarios(problem, rhs, "toy-pool")


def test_single_record_single_scenario_is_an_exact_evaluation(cflp):
    problem, pool = cflp
    dataset = generate_dataset(problem, pool, n_samples=1, max_scenarios=1, seed=3, n_jobs=1, show_progress=False)
    (record,) = dataset.records
    assert len(record.scenario_ids) == 1
    assert record.label == evaluate_recourse(problem, record.x, pool.by_id(record.scenario_ids[0]))


def test_same_seed_gives_identical_file(cflp, tmp_artifacts):
    problem, pool = cflp
    a = generate_dataset(problem, pool, 15, 4, seed=5, n_jobs=1, show_progress=False)
    b = generate_dataset(problem, pool, 15, 4, seed=5, n_jobs=1, show_progress=False)
    assert a.to_jsonl() == b.to_jsonl()
    other = generate_dataset(problem, pool, 15, 4, seed=6, n_jobs=1, show_progress=False)
    assert other.to_jsonl() != a.to_jsonl()
    path = a.save(tmp_artifacts / "data.jsonl")
    assert SurrogateDataset.load(path).to_jsonl() == a.to_jsonl()


def test_labels_match_recomputation(cflp):
    problem, pool = cflp
    dataset = generate_dataset(problem, pool, 10, 5, seed=2, n_jobs=1, show_progress=False)
    for record in dataset:
        assert record.label == pytest.approx(relabel(problem, pool, record), rel=1e-9, abs=1e-9)


def test_records_are_feasible_and_sizes_bounded(cflp):
    problem, pool = cflp
    dataset = generate_dataset(problem, pool, 40, 3, seed=4, n_jobs=1, show_progress=False)
    sizes = dataset.subset_sizes()
    assert sizes.min() >= 1 and sizes.max() <= 3
    dataset.validate(pool)
    for record in dataset:
        assert len(set(record.scenario_ids)) == len(record.scenario_ids)
        assert problem.first_stage.is_feasible(record.x)
    assert dataset.provenance["max_scenarios_per_sample"] == 3
    assert dataset.provenance["pool_size"] == len(pool)
    assert dataset.x_matrix().shape == (40, problem.n_first)


def test_record_index_streams_are_independent_of_batching(toy):
    problem, pool = toy
    generator = DatasetGenerator(problem, pool, 5, seed=8, n_jobs=1, show_progress=False)
    full = generator.generate(12)
    tail = generator.records(range(6, 12))
    for a, b in zip(full.records[6:], tail):
        assert a.x.tobytes() == b.x.tobytes()
        assert a.scenario_ids == b.scenario_ids


def test_parallel_generation_matches_serial(toy):
    problem, pool = toy
    serial = generate_dataset(problem, pool, 60, 6, seed=9, n_jobs=1, show_progress=False)
    parallel = generate_dataset(problem, pool, 60, 6, seed=9, n_jobs=2, show_progress=False)
    assert parallel.to_jsonl() == serial.to_jsonl()


def test_max_scenarios_must_fit_the_pool(toy):
    problem, pool = toy
    with pytest.raises(ValueError):
        DatasetGenerator(problem, pool, len(pool) + 1)
    with pytest.raises(ValueError):
        DatasetGenerator(problem, pool, 5).generate(0)


@pytest.mark.parametrize("n_samples, max_scenarios, n_jobs", [(0, 3, 1), (5, 0, 1), (5, 3, 0)])
def test_zero_counts_are_rejected_not_defaulted(toy, n_samples, max_scenarios, n_jobs):
    problem, pool = toy
    with pytest.raises(ValueError) as info:
        generate_dataset(problem, pool, n_samples, max_scenarios, seed=0, n_jobs=n_jobs, show_progress=False)
    assert "got 30" not in str(info.value)


def test_validate_rejects_unknown_ids_and_oversized_subsets(toy):
    problem, pool = toy
    dataset = SurrogateDataset([DataRecord(x=[0.0, 0.0], scenario_ids=("s0", "missing"), label=1.0)])
    with pytest.raises(ValueError):
        dataset.validate(pool)
    dataset = SurrogateDataset([DataRecord(x=[0.0, 0.0], scenario_ids=("s0", "s1", "s2"), label=1.0)])
    with pytest.raises(ValueError):
        dataset.validate(pool, max_scenarios=2)


def test_record_rejects_bad_labels_and_empty_subsets():
    with pytest.raises(ValueError):
        DataRecord(x=[1.0], scenario_ids=("s0",), label=float("nan"))
    with pytest.raises(ValueError):
        DataRecord(x=[1.0], scenario_ids=(), label=1.0)


@pytest.mark.parametrize("text", [
    "",
    '{"format_version": 99}\n',
    '{"format_version": 1}\n{"x": [1.0], "label": 2.0}\n',
    '{"format_version": 1}\nnot json\n',
])
def test_malformed_dataset_files(text):
    with pytest.raises(FormatError):
        SurrogateDataset.from_jsonl(text)


@pytest.mark.slow
def test_scenario_ids_are_drawn_uniformly(toy):
    problem, pool = toy
    dataset = generate_dataset(problem, pool, 2000, 4, seed=11, n_jobs=1, show_progress=False)
    counts = {sid: 0 for sid in pool.ids}
    for record in dataset:
        for sid in record.scenario_ids:
            counts[sid] += 1
    observed = np.array(list(counts.values()))
    assert stats.chisquare(observed).pvalue > 1e-4
    sizes = np.bincount(dataset.subset_sizes(), minlength=5)[1:]
    assert stats.chisquare(sizes).pvalue > 1e-4
