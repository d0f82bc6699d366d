import numpy as np
import pytest

from src.errors import FormatError, TooLarge, UnboundedRegion
from src.lp import (EQ, GE, LE, MAXIMIZE, LinearProgram, LpStatus, RevisedSimplex, best_vertex, enumerate_vertices,
                    read_lp_text, solve_lp, write_lp_text)
from tests.helpers import random_bounded_lp


def test_single_active_bound():
    lp = LinearProgram.from_rows([1.0], [({0: 1.0}, GE, 3.0)])
    sol = solve_lp(lp)
    assert sol.status == LpStatus.OPTIMAL
    assert sol.primal[0] == pytest.approx(3.0)
    assert sol.objective == pytest.approx(3.0)
    assert sol.dual[0] == pytest.approx(1.0)


def test_contradictory_constraints_are_infeasible():
    lp = LinearProgram.from_rows([0.0], [({0: 1.0}, LE, -1.0)])
    sol = solve_lp(lp)
    assert sol.status == LpStatus.INFEASIBLE
    assert sol.primal is None and sol.dual is None


def test_unbounded_direction():
    lp = LinearProgram.from_rows([-1.0, 0.0], [({0: 1.0, 1: -1.0}, LE, 1.0)])
    assert solve_lp(lp).status == LpStatus.UNBOUNDED


def test_free_variables_and_maximize():
    # max x + y, x + y <= 4, x - y = 0, both free
    lp = LinearProgram.from_rows([1.0, 1.0], [({0: 1.0, 1: 1.0}, LE, 4.0), ({0: 1.0, 1: -1.0}, EQ, 0.0)],
                                 lower=[-np.inf, -np.inf], upper=[np.inf, np.inf], sense=MAXIMIZE)
    sol = solve_lp(lp)
    assert sol.status == LpStatus.OPTIMAL
    np.testing.assert_allclose(sol.primal, [2.0, 2.0], atol=1e-7)
    assert sol.objective == pytest.approx(4.0)


def test_nonpositive_tolerance_rejected():
    lp = LinearProgram.from_rows([1.0], [({0: 1.0}, GE, 3.0)])
    with pytest.raises(ValueError):
        solve_lp(lp, tol=0.0)


@pytest.mark.parametrize("kwargs", [{"feasibility_tol": 0.0}, {"optimality_tol": 0.0}, {"pivot_tol": -1e-9},
                                    {"max_iterations": -1}])
def test_solver_rejects_explicit_zero_tolerances(kwargs):
    with pytest.raises(ValueError):
        RevisedSimplex(**kwargs)


def test_solver_keeps_explicit_tolerances():
    solver = RevisedSimplex(feasibility_tol=1e-5, max_iterations=0)
    assert solver.feasibility_tol == 1e-5
    assert solver.max_iterations == 0
    lp = LinearProgram.from_rows([1.0], [({0: 1.0}, GE, 3.0)])
    assert solver.solve(lp).primal[0] == pytest.approx(3.0)


def test_invalid_bounds_rejected():
    with pytest.raises(ValueError):
        LinearProgram.from_rows([1.0], [], lower=[2.0], upper=[1.0])


@pytest.mark.parametrize("seed", range(8))
def test_random_lp_matches_vertex_oracle(seed):
    lp = random_bounded_lp(seed)
    sol = solve_lp(lp)
    assert sol.status == LpStatus.OPTIMAL
    _, best = best_vertex(lp)
    assert sol.objective == pytest.approx(best, abs=1e-6)


@pytest.mark.parametrize("seed", range(8))
def test_duality_and_complementary_slackness(seed):
    lp = random_bounded_lp(seed)
    sol = solve_lp(lp)
    assert lp.max_violation(sol.primal) <= 1e-7
    assert abs(sol.objective - sol.dual_objective) <= 1e-6 * (1 + abs(sol.objective))
    slack = lp.rhs - lp.row_activity(sol.primal)
    assert np.all(np.abs(sol.dual * slack) <= 1e-6)
    np.testing.assert_allclose(lp.objective, lp.matrix.T @ sol.dual + sol.reduced_costs, atol=1e-9)


def test_solve_is_deterministic():
    lp = random_bounded_lp(42)
    a, b = solve_lp(lp), solve_lp(lp)
    assert a.primal.tobytes() == b.primal.tobytes()
    assert a.dual.tobytes() == b.dual.tobytes()


def test_unit_box_vertices():
    lp = LinearProgram.from_rows([1.0, 1.0], [], lower=[0.0, 0.0], upper=[1.0, 1.0])
    vertices = enumerate_vertices(lp)
    assert len(vertices) == 4
    point, value = best_vertex(lp)
    np.testing.assert_allclose(point, [0.0, 0.0])
    assert value == 0.0


def test_standard_simplex_vertices():
    lp = LinearProgram.from_rows([1.0, 2.0, 3.0], [({0: 1.0, 1: 1.0, 2: 1.0}, EQ, 1.0)])
    assert len(enumerate_vertices(lp)) == 3


def test_duplicate_equality_rows_keep_their_vertices():
    lp = LinearProgram.from_rows([1.0, 2.0], [({0: 1.0, 1: 1.0}, EQ, 1.0), ({0: 2.0, 1: 2.0}, EQ, 2.0)],
                                 upper=[1.0, 1.0])
    points = sorted(tuple(np.round(v, 9)) for v, _ in enumerate_vertices(lp))
    assert points == [(0.0, 1.0), (1.0, 0.0)]
    assert best_vertex(lp)[1] == pytest.approx(solve_lp(lp).objective)


def test_dependent_equality_system():
    # third row is the sum of the first two; the region is the segment x = y, z = 1 - 2x
    rows = [({0: 1.0, 1: 1.0, 2: 1.0}, EQ, 1.0), ({0: 1.0, 1: -1.0}, EQ, 0.0), ({0: 2.0, 2: 1.0}, EQ, 1.0)]
    lp = LinearProgram.from_rows([-1.0, 0.0, 0.0], rows, upper=[1.0, 1.0, 1.0])
    points = sorted(tuple(np.round(v, 9)) for v, _ in enumerate_vertices(lp))
    assert points == [(0.0, 0.0, 1.0), (0.5, 0.5, 0.0)]
    assert best_vertex(lp)[1] == pytest.approx(-0.5)
    assert solve_lp(lp).objective == pytest.approx(-0.5)


def test_inconsistent_dependent_equalities_have_no_vertices():
    lp = LinearProgram.from_rows([1.0, 1.0], [({0: 1.0, 1: 1.0}, EQ, 1.0), ({0: 2.0, 1: 2.0}, EQ, 3.0)],
                                 upper=[1.0, 1.0])
    assert enumerate_vertices(lp) == []
    assert solve_lp(lp).status == LpStatus.INFEASIBLE


def test_vertex_guards():
    with pytest.raises(TooLarge):
        enumerate_vertices(LinearProgram.from_rows([1.0] * 13, [], upper=[1.0] * 13))
    with pytest.raises(UnboundedRegion):
        enumerate_vertices(LinearProgram.from_rows([1.0, 1.0], [({0: 1.0, 1: -1.0}, LE, 1.0)]))


def test_text_format_round_trip():
    lp = LinearProgram.from_rows([1.0, -2.0], [({0: 1.0, 1: 1.0}, LE, 4.0), ({0: 1.0, 1: -1.0}, EQ, 0.0)],
                                 lower=[0.0, -np.inf], upper=[np.inf, 10.0], objective_offset=3.5)
    text = write_lp_text(lp, integer_vars=[1])
    back, integers = read_lp_text(text)
    assert integers == [1]
    np.testing.assert_array_equal(back.objective, lp.objective)
    np.testing.assert_array_equal(back.matrix.toarray(), lp.matrix.toarray())
    np.testing.assert_array_equal(back.lower, lp.lower)
    np.testing.assert_array_equal(back.upper, lp.upper)
    assert back.senses == lp.senses
    assert back.objective_offset == 3.5
    assert write_lp_text(back, integer_vars=[1]) == text


def test_text_format_rejects_undeclared_variable():
    text = "minimize: 1.0*x0\nsubject to:\nc0: 1.0*y <= 1.0\nbounds:\nx0 0.0 inf\nend\n"
    with pytest.raises(FormatError):
        read_lp_text(text)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_random_lp_sweep_matches_vertex_oracle(seed):
    lp = random_bounded_lp(1000 + seed, n_vars=2 + seed % 6, n_rows=2 + seed % 4)
    sol = solve_lp(lp)
    assert sol.status == LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(best_vertex(lp)[1], abs=1e-6)
