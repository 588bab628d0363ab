import numpy as np
import pytest

import advgame as ag
from advgame._profilelp import (
    ProfileProblem,
    _cutting_planes,
    minimize_profile,
    profile_value,
)
from advgame.equilibrium import _profile_problem


def random_problem(rng, units: int, m: int) -> ProfileProblem:
    uu = rng.uniform(0.0, 10.0, (units, m))
    ud = rng.uniform(0.5, 10.0, (units, m))
    return ProfileProblem(
        attack_weights=rng.uniform(0.0, 0.5, m),
        unit_uu=uu,
        unit_den=uu + ud,
        unit_weights=rng.uniform(0.0, 1.0, units),
        lower=(-ud).max(axis=0),
        upper=uu.max(axis=0),
    )


def test_cutting_planes_match_direct_lp():
    rng = np.random.default_rng(99)
    for m in (1, 2, 4):
        problem = random_problem(rng, 500, m)
        direct = minimize_profile(problem, engine="highs")
        cuts = _cutting_planes(problem)
        assert cuts.value == pytest.approx(direct.value, rel=1e-9, abs=1e-9)
        assert profile_value(problem, cuts.g) == pytest.approx(cuts.value, abs=1e-12)


def test_cutting_planes_match_direct_on_game3():
    game = ag.make_game3(ag.Game3Params(k=11, m=4, seed=17))
    problem = _profile_problem(game)
    direct = minimize_profile(problem, engine="highs")
    cuts = _cutting_planes(problem)
    assert cuts.value == pytest.approx(direct.value, rel=1e-9, abs=1e-9)


def test_zero_weights_short_circuit():
    rng = np.random.default_rng(5)
    problem = random_problem(rng, 20, 2)
    problem = ProfileProblem(
        attack_weights=problem.attack_weights,
        unit_uu=problem.unit_uu,
        unit_den=problem.unit_den,
        unit_weights=np.zeros(20),
        lower=problem.lower,
        upper=problem.upper,
    )
    sol = minimize_profile(problem)
    assert sol.engine == "closed-form"
    np.testing.assert_array_equal(sol.g, problem.lower)


def test_solution_value_matches_profile_value(rng):
    problem = random_problem(rng, 100, 3)
    sol = minimize_profile(problem)
    assert sol.value == pytest.approx(profile_value(problem, sol.g), abs=1e-12)
    # No in-box point found below the reported optimum.
    for _ in range(200):
        g = rng.uniform(problem.lower, problem.upper)
        assert profile_value(problem, g) >= sol.value - 1e-9
