"""Shared builders for test games."""

import numpy as np

from advgame import GameSpec, validate_game

DEN_FLOOR = 0.5

# PASS/FAIL lines collected by the acceptance tests; the terminal-summary
# hook in conftest prints them after the run, outside pytest's capture.
ACCEPTANCE_RESULTS: list[str] = []


def random_game(
    rng: np.random.Generator,
    n_vectors: int | None = None,
    m: int | None = None,
    p_attack: float | None = None,
    cfa_scale: float = 6.0,
) -> GameSpec:
    """Random validated game with occasional zero-cost vectors and
    negative detected payoffs, denominator-floored at 0.5."""
    if m is None:
        m = int(rng.integers(1, 4))
    if n_vectors is None:
        cap = 60 if m == 3 else 200
        n_vectors = int(rng.integers(8, cap + 1))
    n = n_vectors
    uu = rng.uniform(0.0, 10.0, (m, n))
    ud = rng.uniform(-1.0, 10.0, (m, n))
    short = uu + ud < DEN_FLOOR
    ud[short] = DEN_FLOOR - uu[short]
    cfa = rng.uniform(0.0, cfa_scale, n)
    cfa[rng.random(n) < 0.1] = 0.0
    p0 = rng.dirichlet(np.ones(n))
    priors = rng.dirichlet(np.ones(m))
    if p_attack is None:
        p_attack = float(rng.uniform(0.05, 0.95))
    return validate_game(
        GameSpec(
            p_attack=p_attack,
            type_priors=priors,
            u_undetected=uu,
            u_detected=ud,
            false_alarm_cost=cfa,
            p0=p0,
        )
    )


def single_vector_game(
    uu: float = 10.0,
    ud: float = 5.0,
    cfa: float = 3.0,
    p_attack: float = 0.5,
) -> GameSpec:
    return validate_game(
        GameSpec(
            p_attack=p_attack,
            type_priors=np.array([1.0]),
            u_undetected=np.array([[uu]]),
            u_detected=np.array([[ud]]),
            false_alarm_cost=np.array([cfa]),
            p0=np.array([1.0]),
        )
    )


def small_game(uu, ud, cfa, p0, priors, p_attack) -> GameSpec:
    """Validated game from plain nested lists."""
    return validate_game(
        GameSpec(
            p_attack=p_attack,
            type_priors=np.asarray(priors, dtype=float),
            u_undetected=np.asarray(uu, dtype=float),
            u_detected=np.asarray(ud, dtype=float),
            false_alarm_cost=np.asarray(cfa, dtype=float),
            p0=np.asarray(p0, dtype=float),
        )
    )
