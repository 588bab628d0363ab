"""Training an approximately optimal profile from labeled samples.

One draw is either "an attacker of type i" (probability p_attack * p_i)
or "a non-attack on vector v" (probability (1 - p_attack) * P0(v)).
A non-attack sample carries only its payoff evaluations -- the
false-alarm cost and each type's undetected/detected payoffs at the
sampled vector -- never the vector identity; that is all the empirical
objective needs, and it is why training requires no knowledge of the
non-attack distribution.

``saa_solve`` maximizes the sample average

    U_tilde(G) = -(1/N) [ sum_attacks G_type
                          + sum_non_attacks c_fa * pi_G(sample) ]

exactly, via the same linear program as the full equilibrium but with
one detection variable per non-attack record, so the program's size
depends only on the sample count, not on the vector-set size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._profilelp import ProfileProblem, minimize_profile
from .equilibrium import EquilibriumSolution, min_gain, solve_defender
from .errors import BadLabel, MissingFeature, ZeroDenominator
from .game import GainBounds, GameSpec, UtilityProfile, gain_bounds

MIN_RECORD_DENOMINATOR = 1e-9


@dataclass(frozen=True)
class SampleRecord:
    """One training draw: an attack of some type, or an annotated non-attack."""

    type_index: int | None
    c_fa: float | None = None
    u_undetected: np.ndarray | None = None
    u_detected: np.ndarray | None = None

    @classmethod
    def attack(cls, type_index: int) -> "SampleRecord":
        return cls(type_index=int(type_index))

    @classmethod
    def non_attack(cls, c_fa: float, u_undetected, u_detected) -> "SampleRecord":
        uu = np.asarray(u_undetected, dtype=np.float64)
        ud = np.asarray(u_detected, dtype=np.float64)
        if np.any(uu + ud < MIN_RECORD_DENOMINATOR):
            raise ValueError("non-attack record has a degenerate payoff pair")
        return cls(type_index=None, c_fa=float(c_fa), u_undetected=uu, u_detected=ud)

    @property
    def is_attack(self) -> bool:
        return self.type_index is not None


@dataclass(frozen=True)
class TrainingReport:
    g_trained: UtilityProfile
    empirical_value: float
    n_samples: int
    seed: int | None = None


def draw_samples(
    game: GameSpec, n: int, rng: np.random.Generator
) -> list[SampleRecord]:
    """Draw n independent samples from the game's generating process."""
    if n < 1:
        raise ValueError("n must be at least 1")
    m = game.num_types
    probs = np.concatenate(
        [game.p_attack * game.type_priors, (1.0 - game.p_attack) * game.p0]
    )
    probs = probs / probs.sum()
    outcomes = rng.choice(probs.shape[0], size=n, p=probs)
    records = []
    for outcome in outcomes:
        if outcome < m:
            records.append(SampleRecord.attack(int(outcome)))
        else:
            v = int(outcome) - m
            records.append(
                SampleRecord.non_attack(
                    game.false_alarm_cost[v],
                    game.u_undetected[:, v],
                    game.u_detected[:, v],
                )
            )
    return records


def load_samples(
    rows,
    payoffs,
    label_field: str = "Class",
    type_field: str = "Type",
) -> list[SampleRecord]:
    """Convert labeled dataset rows into sample records.

    ``payoffs`` evaluates a row's features into (c_fa, u_undetected,
    u_detected) arrays of length ``payoffs.num_types``.  Rows labeled 1
    become attack records; the attacker type is taken from
    ``type_field`` when present and defaults to the single type when
    there is only one.  Multi-type datasets without a type column are
    refused rather than guessed at.
    """
    m = int(payoffs.num_types)
    records = []
    for row in rows:
        try:
            label = int(str(row[label_field]).strip())
        except KeyError:
            raise MissingFeature(f"row lacks the {label_field!r} column") from None
        except ValueError:
            raise BadLabel(f"label {row[label_field]!r} is not an integer") from None
        if label not in (0, 1):
            raise BadLabel(f"label {label} is not 0 or 1")
        if label == 1:
            raw_type = row.get(type_field) if hasattr(row, "get") else None
            if raw_type is None or str(raw_type).strip() == "":
                if m != 1:
                    raise BadLabel(
                        "attack row lacks a type and the game has "
                        f"{m} attacker types"
                    )
                type_index = 0
            else:
                type_index = int(str(raw_type).strip())
                if not 0 <= type_index < m:
                    raise BadLabel(f"type {type_index} outside [0, {m})")
            records.append(SampleRecord.attack(type_index))
        else:
            records.append(SampleRecord.non_attack(*payoffs.evaluate(row)))
    return records


def _split_samples(samples, m: int):
    attack_counts = np.zeros(m)
    cfa, uu, ud = [], [], []
    for rec in samples:
        if rec.is_attack:
            if not 0 <= rec.type_index < m:
                raise BadLabel(f"sample type {rec.type_index} outside [0, {m})")
            attack_counts[rec.type_index] += 1.0
        else:
            if rec.u_undetected.shape[0] != m:
                raise BadLabel(
                    f"non-attack record has {rec.u_undetected.shape[0]} payoff "
                    f"pairs, expected {m}"
                )
            cfa.append(rec.c_fa)
            uu.append(rec.u_undetected)
            ud.append(rec.u_detected)
    uu_arr = np.array(uu) if uu else np.zeros((0, m))
    ud_arr = np.array(ud) if ud else np.zeros((0, m))
    return attack_counts, np.asarray(cfa, dtype=np.float64), uu_arr, ud_arr


def empirical_objective(samples, bounds: GainBounds, g) -> float:
    """Evaluate the sample-average objective U_tilde at a profile."""
    g = np.asarray(g, dtype=np.float64)
    m = bounds.lower.shape[0]
    counts, cfa, uu, ud = _split_samples(samples, m)
    total = counts @ g
    if cfa.shape[0]:
        pi = np.maximum(((uu - g[None, :]) / (uu + ud)).max(axis=1), 0.0)
        total += cfa @ pi
    return float(-total / len(samples))


def saa_solve(
    samples,
    bounds: GainBounds,
    engine: str = "auto",
    seed: int | None = None,
) -> TrainingReport:
    """Maximize the empirical objective exactly over the gain box.

    The program has one detection variable per non-attack record and m
    profile variables; nothing scales with the size of the vector set.
    """
    if not samples:
        raise ValueError("saa_solve requires at least one sample")
    m = bounds.lower.shape[0]
    counts, cfa, uu, ud = _split_samples(samples, m)
    n = len(samples)
    problem = ProfileProblem(
        attack_weights=counts / n,
        unit_uu=uu,
        unit_den=uu + ud,
        unit_weights=cfa / n,
        lower=np.asarray(bounds.lower, dtype=np.float64),
        upper=np.asarray(bounds.upper, dtype=np.float64),
    )
    sol = minimize_profile(problem, engine=engine)
    profile = UtilityProfile(
        g=sol.g, lower_bounds=problem.lower, upper_bounds=problem.upper
    )
    return TrainingReport(
        g_trained=profile,
        empirical_value=-sol.value,
        n_samples=n,
        seed=seed,
    )


def approximation_ratio(
    game: GameSpec,
    g_trained: UtilityProfile | np.ndarray,
    solution: EquilibriumSolution | None = None,
    engine: str = "auto",
) -> float:
    """Percentage ratio of the optimal to the trained objective value.

    Both values are nonpositive and the optimum dominates, so the result
    lies in (0, 100].  Raises :class:`ZeroDenominator` (carrying the raw
    value gap) when the trained value is zero and the ratio is undefined.
    """
    if solution is None:
        solution = solve_defender(game, engine=engine)
    trained_value = min_gain(game, g_trained)
    if trained_value == 0.0:
        raise ZeroDenominator(
            "trained objective value is zero; approximation ratio undefined",
            value_gap=solution.value - trained_value,
        )
    return float(100.0 * solution.value / trained_value)


def in_argmax(
    game: GameSpec,
    g: UtilityProfile | np.ndarray,
    solution: EquilibriumSolution,
    tol: float = 1e-7,
) -> bool:
    """Membership in the optimizer set, tested by value gap.

    The maximizer set can be a whole face of the polyhedron, so
    coordinates are not compared; achieving the optimal value is what
    membership means.
    """
    return bool(min_gain(game, g) >= solution.value - tol)


def estimate_pN(
    game: GameSpec,
    n: int,
    replicas: int,
    rng: np.random.Generator,
    solution: EquilibriumSolution | None = None,
    engine: str = "auto",
) -> float:
    """Fraction of independent size-n trainings that land in the argmax."""
    if solution is None:
        solution = solve_defender(game, engine=engine)
    bounds = gain_bounds(game)
    streams = rng.spawn(replicas)
    hits = 0
    for stream in streams:
        report = saa_solve(draw_samples(game, n, stream), bounds, engine=engine)
        if in_argmax(game, report.g_trained, solution):
            hits += 1
    return hits / replicas
