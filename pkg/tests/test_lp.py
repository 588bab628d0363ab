import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advgame.lp import solve_lp


def test_basic_minimization():
    # min -x - 2y st x + y <= 4, x <= 3, y <= 2  ->  (2, 2)
    sol = solve_lp(
        c=[-1.0, -2.0],
        a_ub=[[1.0, 1.0]],
        b_ub=[4.0],
        lower=[0.0, 0.0],
        upper=[3.0, 2.0],
        engine="dense",
    )
    assert sol.ok
    assert sol.objective == pytest.approx(-6.0, abs=1e-9)
    assert sol.x == pytest.approx([2.0, 2.0], abs=1e-9)


def test_equality_constraints():
    # min x + y st x + 2y = 3, x,y >= 0 -> (0, 1.5)
    sol = solve_lp(
        c=[1.0, 1.0], a_eq=[[1.0, 2.0]], b_eq=[3.0], engine="dense"
    )
    assert sol.ok
    assert sol.objective == pytest.approx(1.5, abs=1e-9)


def test_infeasible():
    sol = solve_lp(
        c=[1.0],
        a_ub=[[1.0], [-1.0]],
        b_ub=[1.0, -3.0],   # x <= 1 and x >= 3
        engine="dense",
    )
    assert sol.status == "infeasible"


def test_unbounded():
    sol = solve_lp(c=[-1.0], engine="dense")
    assert sol.status == "unbounded"


def test_negative_lower_bounds():
    # min x st x >= -5
    sol = solve_lp(c=[1.0], lower=[-5.0], engine="dense")
    assert sol.ok
    assert sol.x[0] == pytest.approx(-5.0, abs=1e-12)


def test_beale_cycling_example():
    """Classic degenerate program on which naive Dantzig pivoting cycles."""
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    a_ub = np.array(
        [
            [0.25, -60.0, -1.0 / 25.0, 9.0],
            [0.5, -90.0, -1.0 / 50.0, 3.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    b_ub = np.array([0.0, 0.0, 1.0])
    sol = solve_lp(c, a_ub=a_ub, b_ub=b_ub, engine="dense")
    assert sol.ok
    assert sol.objective == pytest.approx(-0.05, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_dense_matches_highs_on_random_programs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    k = int(rng.integers(1, 10))
    c = rng.normal(size=n)
    a_ub = rng.normal(size=(k, n))
    lower = rng.uniform(-2, 0, n)
    upper = lower + rng.uniform(0.5, 4, n)
    x0 = rng.uniform(lower, upper)
    b_ub = a_ub @ x0 + rng.uniform(0, 1, k)   # feasible by construction
    dense = solve_lp(c, a_ub=a_ub, b_ub=b_ub, lower=lower, upper=upper, engine="dense")
    highs = solve_lp(c, a_ub=a_ub, b_ub=b_ub, lower=lower, upper=upper, engine="highs")
    assert dense.ok and highs.ok
    assert dense.objective == pytest.approx(highs.objective, abs=1e-7)
    # The returned point must be feasible and achieve the objective.
    assert np.all(a_ub @ dense.x <= b_ub + 1e-8)
    assert np.all(dense.x >= lower - 1e-9)
    assert np.all(dense.x <= upper + 1e-9)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_dense_matches_highs_with_equalities(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    c = rng.normal(size=n)
    a_eq = rng.normal(size=(2, n))
    x0 = rng.uniform(0, 2, n)
    b_eq = a_eq @ x0
    upper = np.full(n, 5.0)
    dense = solve_lp(c, a_eq=a_eq, b_eq=b_eq, upper=upper, engine="dense")
    highs = solve_lp(c, a_eq=a_eq, b_eq=b_eq, upper=upper, engine="highs")
    assert dense.ok and highs.ok
    assert dense.objective == pytest.approx(highs.objective, abs=1e-7)
    assert np.all(np.abs(a_eq @ dense.x - b_eq) <= 1e-8)
