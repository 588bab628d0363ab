"""Solvers and learners for Bayesian adversarial-classification games.

The package computes exact Bayesian Nash equilibria of games between a
classifier-playing defender and payoff-driven attackers, trains
near-optimal randomized classifiers from labeled samples, and learns
online against best-responding attackers with a regret guarantee that
does not grow with the size of the data space.
"""

from .equilibrium import (
    BneReport,
    EquilibriumSolution,
    ThresholdClassifier,
    brute_force_oracle,
    defender_guarantee,
    min_gain,
    oracle_gap_bound,
    pi_of_G,
    sample_threshold_classifier,
    solve_attacker,
    solve_defender,
    verify_bne,
)
from .game import (
    AttackStrategy,
    DetectionPolicy,
    GainBounds,
    GameSpec,
    UtilityProfile,
    attacker_payoff,
    best_response,
    defender_payoff,
    gain_bounds,
    make_profile,
    validate_game,
)
from .gallery import (
    FraudPayoffs,
    Game1Params,
    Game2Params,
    Game3Params,
    ingest_fraud_csv,
    make_game1,
    make_game2,
    make_game3,
)
from .io import load_game, save_game
from .online import (
    Event,
    OnlineTrace,
    RegretBound,
    RegretResult,
    distance_to_equilibrium,
    efficient_bound_constants,
    efficient_ogd_run,
    environment_step,
    naive_bound_constants,
    naive_ogd_run,
    regret_bound,
    rollout,
    stackelberg_regret,
)
from .training import (
    SampleRecord,
    TrainingReport,
    approximation_ratio,
    draw_samples,
    empirical_objective,
    estimate_pN,
    in_argmax,
    load_samples,
    saa_solve,
)

__version__ = "0.1.0"

__all__ = [
    "AttackStrategy",
    "BneReport",
    "DetectionPolicy",
    "EquilibriumSolution",
    "Event",
    "FraudPayoffs",
    "GainBounds",
    "Game1Params",
    "Game2Params",
    "Game3Params",
    "GameSpec",
    "OnlineTrace",
    "RegretBound",
    "RegretResult",
    "SampleRecord",
    "ThresholdClassifier",
    "TrainingReport",
    "UtilityProfile",
    "approximation_ratio",
    "attacker_payoff",
    "best_response",
    "brute_force_oracle",
    "defender_guarantee",
    "defender_payoff",
    "distance_to_equilibrium",
    "draw_samples",
    "efficient_bound_constants",
    "efficient_ogd_run",
    "empirical_objective",
    "environment_step",
    "estimate_pN",
    "gain_bounds",
    "in_argmax",
    "ingest_fraud_csv",
    "load_game",
    "load_samples",
    "make_game1",
    "make_game2",
    "make_game3",
    "make_profile",
    "min_gain",
    "naive_bound_constants",
    "naive_ogd_run",
    "oracle_gap_bound",
    "pi_of_G",
    "regret_bound",
    "rollout",
    "saa_solve",
    "sample_threshold_classifier",
    "save_game",
    "solve_attacker",
    "solve_defender",
    "stackelberg_regret",
    "validate_game",
    "verify_bne",
]
