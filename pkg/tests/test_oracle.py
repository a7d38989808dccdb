import math

import numpy as np
import pytest

import odeseries.expr as ex
import odeseries.problem as pb
from odeseries.fundmat import fundamental_user
from odeseries.grid import Grid
from odeseries.oracle import BlowUpError, compare, residual, rk4_solve
from odeseries.series import SeriesOptions, solve_series

PAPER_COLUMNS = [
    ex.parse_vector(["3*exp(x)", "-exp(x)"]),
    ex.parse_vector(["exp(-x)", "-exp(-x)"]),
]


def _scalar_problem(a_src: str, f_src=None, interval=(0.0, 1.0), x0=0.0):
    return pb.Problem(
        n=1,
        h=ex.parse_matrix([[a_src]]),
        z=ex.parse_matrix([["0"]]),
        forcing=ex.parse_vector([f_src]) if f_src else None,
        interval=interval,
        x0=x0,
        c=np.array([1.0]),
    )


def _paper_problem(c):
    return pb.Problem(
        n=2,
        h=ex.parse_matrix([["2", "3"], ["-1", "-2"]]),
        z=ex.parse_matrix(
            [
                ["exp(-2*x)-3*exp(2*x)", "exp(-2*x)-9*exp(2*x)"],
                ["exp(2*x)-exp(-2*x)", "3*exp(2*x)-exp(-2*x)"],
            ]
        ),
        forcing=None,
        interval=(0.0, 1.0),
        x0=0.0,
        c=np.asarray(c, dtype=float),
    )


def _paper_exact(x: float) -> np.ndarray:
    # closed form for c = (1, 1): coefficient vector (e^{2x}, e^{2x})
    m = np.array([[3 * math.exp(x), math.exp(-x)], [-math.exp(x), -math.exp(-x)]])
    return m @ np.array([math.exp(2 * x), math.exp(2 * x)])


def test_rk4_exponential():
    g = Grid(0.0, 1.0, 1001)
    sol = rk4_solve(_scalar_problem("1"), g, np.array([1.0]))
    assert sol.values[-1, 0] == pytest.approx(math.e, abs=1e-10)


def test_rk4_paper_example():
    g = Grid(0.0, 1.0, 1001)
    p = _paper_problem([1.0, 1.0])
    sol = rk4_solve(p, g, np.array([4.0, -2.0]))  # M(0) (1,1)
    assert np.max(np.abs(sol.values[-1] - _paper_exact(1.0))) <= 1e-8


def test_rk4_zero_system_constant():
    g = Grid(0.0, 1.0, 11)
    p = pb.Problem(
        n=2,
        h=ex.parse_matrix([["0", "0"], ["0", "0"]]),
        z=ex.parse_matrix([["0", "0"], ["0", "0"]]),
        forcing=None, interval=(0.0, 1.0), x0=0.0, c=np.array([0.0, 0.0]),
    )
    sol = rk4_solve(p, g, np.array([2.0, -3.0]))
    assert np.allclose(sol.values, [2.0, -3.0])


def test_rk4_marches_left_of_x0():
    g = Grid(0.0, 1.0, 1001)
    p = _scalar_problem("1", interval=(0.0, 1.0), x0=0.5)
    sol = rk4_solve(p, g, np.array([math.exp(0.5)]))
    assert sol.values[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert sol.values[-1, 0] == pytest.approx(math.e, abs=1e-10)


def test_rk4_order_of_accuracy():
    # truncation-dominated grids: halving the step cuts the endpoint
    # error by ~16 (14 allows roundoff slack)
    errs = []
    for n_nodes in (11, 21):
        g = Grid(0.0, 1.0, n_nodes)
        sol = rk4_solve(_scalar_problem("1"), g, np.array([1.0]))
        errs.append(abs(sol.values[-1, 0] - math.e))
    assert errs[0] / errs[1] >= 14.0


def test_rk4_blow_up_detected():
    g = Grid(0.0, 1.0, 101)
    with pytest.raises(BlowUpError):
        rk4_solve(_scalar_problem("2000"), g, np.array([1.0]))


def test_residual_on_exact_paper_solution():
    g = Grid(0.0, 1.0, 1001)
    p = _paper_problem([1.0, 1.0])
    values = np.stack([_paper_exact(x) for x in g.nodes])
    # pure central-difference truncation: C dx^2 with C from y'''
    y3_scale = max(float(np.max(np.abs(np.stack([_paper_exact(x) for x in g.nodes])))), 1.0) * 27.0
    assert residual(values, p, g) <= y3_scale / 6.0 * g.spacing**2


def test_residual_zero_solution():
    g = Grid(0.0, 1.0, 101)
    p = _paper_problem([1.0, 1.0])
    assert residual(np.zeros((101, 2)), p, g) == 0.0


def test_residual_flags_violation():
    g = Grid(0.0, 1.0, 101)
    p = _scalar_problem("0", f_src="1")
    assert residual(np.ones((101, 1)), p, g) == pytest.approx(1.0)


def test_compare_identical():
    a = np.ones((11, 2))
    assert compare(a, a).sup_diff == 0.0


def test_compare_shift():
    a = np.zeros((11, 2))
    b = a + 1e-5
    cmp = compare(a, b)
    assert cmp.sup_diff == pytest.approx(1e-5)
    assert np.allclose(cmp.per_node_diff, 1e-5)


def test_compare_grid_mismatch():
    with pytest.raises(ValueError):
        compare(np.zeros((11, 2)), np.zeros((12, 2)))


def test_mutual_certification_on_paper_example():
    p = _paper_problem([1.0, 1.0])
    g = Grid(0.0, 1.0, 1001)
    table = fundamental_user(PAPER_COLUMNS, g)
    opts = SeriesOptions()
    sol = solve_series(p, table, opts)
    rk4 = rk4_solve(p, g, table.m[0] @ p.c)
    sup = compare(sol.partial_sum.values, rk4.values).sup_diff
    s_norm = sol.partial_sum.sup_norm
    assert sup <= 10.0 * (opts.abs_tol + opts.rel_tol * s_norm + 1e-5)
