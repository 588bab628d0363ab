import numpy as np
import pytest

import advgame as ag

from helpers import ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def game1():
    return ag.make_game1()


@pytest.fixture(scope="session")
def game1_solution(game1):
    return ag.solve_defender(game1)


@pytest.fixture(scope="session")
def game2_small():
    return ag.make_game2(ag.Game2Params(ell=0.03, max_amount=999))


@pytest.fixture(scope="session")
def game3_small():
    return ag.make_game3(ag.Game3Params(k=6, m=4, seed=3))


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
