import itertools

import numpy as np
import pandas as pd
import pytest

from src.errors import NoIncumbentAtLimit
from src.lp import GE, LE, MAXIMIZE, LinearProgram, ProgramBuilder, solve_lp
from src.milp import (MilpStatus, MixedIntegerProgram, SolverConfig, lp_relaxation, read_mip_text, solve_milp,
                      write_mip_text)


def knapsack(sense: str = MAXIMIZE) -> MixedIntegerProgram:
    sign = 1.0 if sense == MAXIMIZE else -1.0
    lp = LinearProgram.from_rows([sign * 5.0, sign * 4.0], [({0: 3.0, 1: 2.0}, LE, 4.0)],
                                 lower=[0.0, 0.0], upper=[1.0, 1.0], sense=sense)
    return MixedIntegerProgram(lp, frozenset({0, 1}), frozenset({0, 1}))


def random_binary_mip(seed: int, n: int = 8, m: int = 3) -> MixedIntegerProgram:
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 1.0, size=(m, n))
    rhs = 0.5 * A.sum(axis=1)
    c = rng.uniform(-1.0, 1.0, size=n)
    builder = ProgramBuilder()
    builder.add_variables(n, 0.0, 1.0, c, integer=True)
    for i in range(m):
        builder.add_constraint({j: A[i, j] for j in range(n)}, LE, rhs[i])
    return MixedIntegerProgram.from_builder(builder)


def enumerate_binary(mip: MixedIntegerProgram) -> float:
    best = np.inf
    for bits in itertools.product((0.0, 1.0), repeat=mip.n_vars):
        x = np.array(bits)
        if mip.base.max_violation(x) <= 1e-9:
            best = min(best, mip.base.objective_value(x))
    return best


def test_knapsack_maximize():
    sol = solve_milp(knapsack())
    assert sol.status == MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(5.0)
    np.testing.assert_allclose(sol.incumbent, [1.0, 0.0])


def test_knapsack_minimization_form():
    sol = solve_milp(knapsack("minimize"))
    assert sol.objective == pytest.approx(-5.0)
    assert sol.bound <= sol.objective + 1e-9


def test_integral_relaxation_needs_one_node():
    lp = LinearProgram.from_rows([1.0, 1.0], [({0: 1.0}, GE, 1.0), ({1: 1.0}, GE, 2.0)],
                                 lower=[0.0, 0.0], upper=[5.0, 5.0])
    sol = solve_milp(MixedIntegerProgram(lp, frozenset({0, 1})))
    assert sol.status == MilpStatus.OPTIMAL
    assert sol.node_count == 1
    assert sol.objective == pytest.approx(3.0)


@pytest.mark.parametrize("seed", range(6))
def test_matches_exhaustive_enumeration(seed):
    mip = random_binary_mip(seed)
    sol = solve_milp(mip)
    assert sol.status == MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(enumerate_binary(mip), abs=1e-6)
    frac = np.abs(sol.incumbent - np.round(sol.incumbent))
    assert np.all(frac <= 1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_relaxation_bounds_the_integer_optimum(seed):
    mip = random_binary_mip(100 + seed, n=6)
    relaxed = solve_lp(lp_relaxation(mip))
    assert relaxed.objective <= solve_milp(mip).objective + 1e-9


def test_relaxation_of_pure_lp_is_identity():
    lp = LinearProgram.from_rows([1.0], [({0: 1.0}, GE, 3.0)])
    assert lp_relaxation(lp) is lp
    relaxed = lp_relaxation(knapsack())
    np.testing.assert_array_equal(relaxed.lower, [0.0, 0.0])
    np.testing.assert_array_equal(relaxed.upper, [1.0, 1.0])


def test_incumbent_is_monotone_in_node_log():
    sol = solve_milp(random_binary_mip(7, n=10))
    values = [r.incumbent for r in sol.node_log]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_node_limit_without_incumbent_raises():
    with pytest.raises(NoIncumbentAtLimit) as info:
        solve_milp(knapsack(), SolverConfig(node_limit=1))
    assert info.value.node_count == 1


def test_node_log_csv(tmp_path):
    path = tmp_path / "nodes.csv"
    sol = solve_milp(knapsack(), SolverConfig(node_log_path=str(path)))
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["node_id", "depth", "bound", "incumbent", "time_s"]
    assert len(frame) == len(sol.node_log)


def test_binary_bounds_are_enforced():
    lp = LinearProgram.from_rows([1.0], [], lower=[0.0], upper=[2.0])
    with pytest.raises(ValueError):
        MixedIntegerProgram(lp, frozenset({0}), frozenset({0}))
    with pytest.raises(ValueError):
        SolverConfig(gap_tol=-1.0)


def test_mip_text_round_trip():
    mip = knapsack()
    back = read_mip_text(write_mip_text(mip))
    assert back.integer_vars == mip.integer_vars
    assert back.binary_vars == mip.binary_vars
    assert solve_milp(back).objective == pytest.approx(5.0)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_binary_sweep_matches_exhaustive_enumeration(seed):
    mip = random_binary_mip(1000 + seed, n=10, m=2 + seed % 3)
    sol = solve_milp(mip)
    assert sol.status == MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(enumerate_binary(mip), abs=1e-6)
