import numpy as np
import pytest

from src.benchmarks import cflp_scenario, gen_cflp, gen_mixed_recourse_example, mixed_recourse_scenarios, \
    sample_scenarios
from src.errors import DimensionMismatch, EmptyScenarioSet, RecourseInfeasible
from src.lp import best_vertex
from src.milp import MilpSolution, MilpStatus, solve_milp
from src.spmodel import recourse as recourse_module
from src.spmodel import (FirstStageSampler, Scenario, ScenarioSet, build_extensive_form, evaluate_recourse,
                         expected_recourse, load_problem, load_scenarios, probe_convexity, recourse_dual_program,
                         save_problem, save_scenarios, split_solution)
from src.utils import named_rng
from tests.helpers import toy_continuous_problem, toy_scenarios


@pytest.fixture(scope="module")
def cflp_small():
    return gen_cflp(3, 4, seed=0)


def test_single_scenario_extensive_form_is_the_joint_problem():
    problem = toy_continuous_problem()
    scenarios = toy_scenarios(problem, [[5.0, 6.0]])
    ef = build_extensive_form(problem, scenarios)
    assert ef.n_vars == 4 and ef.n_integer == 0
    sol = solve_milp(ef)
    # optimum 13, attained at x = (3, 3) where the residual (2, 3) costs 7
    assert sol.objective == pytest.approx(13.0)
    x, ys = split_solution(problem, scenarios, sol.incumbent)
    assert x.size == 2 and len(ys) == 1


def test_cflp_extensive_form_layout():
    problem = gen_cflp(10, 10, seed=0)
    scenarios = sample_scenarios(problem, 5, seed=0)
    ef = build_extensive_form(problem, scenarios)
    assert ef.n_vars == 10 + 5 * (10 * 10 + 10)
    assert ef.integer_vars == frozenset(range(10))
    assert ef.binary_vars == frozenset(range(10))
    assert ef.base.n_rows == 5 * (10 + 10)


def test_scenario_duplication_leaves_optimum_unchanged(cflp_small):
    scenarios = sample_scenarios(cflp_small, 2, seed=3)
    doubled = ScenarioSet.uniform("doubled", [
        Scenario(f"{s.scenario_id}{tag}", 0.25, s.feature_vector, h=s.h) for s in scenarios for tag in ("a", "b")
    ], cflp_small.name)
    base = solve_milp(build_extensive_form(cflp_small, scenarios))
    dup = solve_milp(build_extensive_form(cflp_small, doubled))
    assert base.status == dup.status == MilpStatus.OPTIMAL
    assert dup.objective == pytest.approx(base.objective, abs=1e-6)


def test_extensive_form_matches_recourse_evaluation(cflp_small):
    scenarios = sample_scenarios(cflp_small, 3, seed=1)
    sol = solve_milp(build_extensive_form(cflp_small, scenarios))
    x = np.round(sol.incumbent[:cflp_small.n_first])
    value = float(cflp_small.first_stage.c @ x) + expected_recourse(cflp_small, x, scenarios)
    assert value == pytest.approx(sol.objective, abs=1e-5)


def test_extensive_form_checks_scenario_dimensions(cflp_small):
    bad = ScenarioSet.uniform("bad", [Scenario("s0", 1.0, [1.0], h=[1.0, 2.0])])
    with pytest.raises(DimensionMismatch):
        build_extensive_form(cflp_small, bad)


def test_zero_demand_costs_nothing(cflp_small):
    scenario = cflp_scenario(cflp_small, "zero", np.zeros(4), 1.0)
    assert evaluate_recourse(cflp_small, np.ones(3), scenario) == pytest.approx(0.0)


@pytest.mark.parametrize("seed", range(5))
def test_recourse_equals_best_dual_vertex(seed):
    problem = toy_continuous_problem()
    scenario = toy_scenarios(problem, [[5.0, 6.0]]).scenarios[0]
    x = named_rng("dual-oracle", seed).uniform(0.0, 3.0, size=2)
    value = evaluate_recourse(problem, x, scenario)
    _, dual_best = best_vertex(recourse_dual_program(problem, x, scenario))
    assert value == pytest.approx(dual_best, abs=1e-6)


def test_recourse_at_origin():
    problem = toy_continuous_problem()
    scenario = toy_scenarios(problem, [[5.0, 6.0]]).scenarios[0]
    assert evaluate_recourse(problem, np.zeros(2), scenario) == pytest.approx(16.0)


def test_mixed_recourse_branches():
    problem = gen_mixed_recourse_example(big_m=3.0, h_values=(10.0,))
    scenario = mixed_recourse_scenarios(problem).scenarios[0]
    # h - Tx = 8 > M: the binary cannot switch on, cost is q_cont * 8
    assert evaluate_recourse(problem, np.array([2.0]), scenario) == pytest.approx(8.0)
    # h - Tx = 2 <= M: the binary covers it at cost q_int
    assert evaluate_recourse(problem, np.array([8.0]), scenario) == pytest.approx(1.0)
    assert evaluate_recourse(problem, np.array([10.0]), scenario) == pytest.approx(0.0)


def test_recourse_stopped_without_incumbent_is_not_a_label(monkeypatch):
    problem = gen_mixed_recourse_example(big_m=3.0, h_values=(10.0,))
    scenario = mixed_recourse_scenarios(problem).scenarios[0]
    stopped = MilpSolution(status=MilpStatus.TIME_LIMIT, incumbent=None, objective=np.inf, bound=0.0,
                           gap=np.inf, node_count=3)
    monkeypatch.setattr(recourse_module, "solve_milp", lambda program, config: stopped)
    with pytest.raises(RecourseInfeasible) as info:
        evaluate_recourse(problem, np.array([2.0]), scenario)
    assert info.value.scenario_id == scenario.scenario_id


def test_recourse_stopped_with_incumbent_returns_its_value(monkeypatch):
    problem = gen_mixed_recourse_example(big_m=3.0, h_values=(10.0,))
    scenario = mixed_recourse_scenarios(problem).scenarios[0]
    stopped = MilpSolution(status=MilpStatus.TIME_LIMIT, incumbent=np.zeros(2), objective=8.5, bound=8.0,
                           gap=0.06, node_count=3)
    monkeypatch.setattr(recourse_module, "solve_milp", lambda program, config: stopped)
    assert evaluate_recourse(problem, np.array([2.0]), scenario) == 8.5


def test_expected_recourse_single_and_identical_scenarios():
    problem = toy_continuous_problem()
    x = np.array([1.0, 0.5])
    one = toy_scenarios(problem, [[5.0, 6.0]])
    two = toy_scenarios(problem, [[5.0, 6.0], [5.0, 6.0]])
    single = evaluate_recourse(problem, x, one.scenarios[0])
    assert expected_recourse(problem, x, one) == pytest.approx(single)
    assert expected_recourse(problem, x, two) == pytest.approx(single)


def test_expected_recourse_matches_independent_sum(cflp_small):
    scenarios = sample_scenarios(cflp_small, 10, seed=4)
    x = np.array([1.0, 0.0, 1.0])
    values = [evaluate_recourse(cflp_small, x, s) for s in scenarios]
    assert expected_recourse(cflp_small, x, scenarios) == pytest.approx(sum(values) / 10, rel=1e-12)


def test_continuous_recourse_is_convex():
    problem = toy_continuous_problem()
    scenarios = toy_scenarios(problem, [[5.0, 6.0], [2.0, 8.0], [7.0, 1.0]])
    report = probe_convexity(problem, scenarios, n_pairs=60, seed=0)
    assert report.n_tested == 60
    assert report.violations == 0


def test_cflp_relaxation_is_convex(cflp_small):
    scenarios = sample_scenarios(cflp_small, 2, seed=0)
    report = probe_convexity(cflp_small, scenarios, n_pairs=20, seed=0, relaxed=True)
    assert report.violations == 0


def test_mixed_recourse_breaks_convexity():
    problem = gen_mixed_recourse_example(big_m=3.0, h_values=(10.0,))
    report = probe_convexity(problem, mixed_recourse_scenarios(problem), n_pairs=100, seed=0)
    assert report.violations > 0
    assert report.max_violation > 0.0


def test_zero_pairs_is_an_empty_report():
    problem = toy_continuous_problem()
    report = probe_convexity(problem, toy_scenarios(problem, [[5.0, 6.0]]), n_pairs=0, seed=0)
    assert report.violations == 0 and report.max_violation == 0.0 and report.n_tested == 0


def test_sampler_returns_feasible_binary_points(cflp_small):
    sampler = FirstStageSampler(cflp_small.first_stage)
    points = sampler.sample_many(named_rng("sampler-test"), 20)
    assert points.shape == (20, 3)
    assert all(cflp_small.first_stage.is_feasible(x) for x in points)


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValueError):
        ScenarioSet("bad", (Scenario("a", 0.5, [1.0]), Scenario("b", 0.4, [2.0])))
    with pytest.raises(EmptyScenarioSet):
        ScenarioSet.uniform("empty", [])


def test_problem_and_scenarios_survive_a_save(cflp_small, tmp_path):
    scenarios = sample_scenarios(cflp_small, 3, seed=2)
    save_problem(tmp_path / "instance.json", cflp_small)
    save_scenarios(tmp_path / "scenarios.json", scenarios)
    problem = load_problem(tmp_path / "instance.json")
    loaded = load_scenarios(tmp_path / "scenarios.json", problem)
    x = np.array([1.0, 1.0, 0.0])
    assert expected_recourse(problem, x, loaded) == pytest.approx(expected_recourse(cflp_small, x, scenarios))
