"""Game data model and payoff algebra.

A game is played between a defender, who randomizes a binary classifier
over a finite set of data vectors, and attackers of ``m`` possible types.
An incoming example is an attack with probability ``p_attack``; attack
types follow ``type_priors`` and non-attacks follow the distribution
``p0``.  Per type ``i`` and vector ``v`` the attacker gains
``u_undetected[i, v]`` when missed and pays ``u_detected[i, v]`` when
caught; the defender pays ``false_alarm_cost[v]`` for flagging a
non-attack.

Mixed classifier strategies are represented throughout by the
per-vector probability of detection ``pi`` (a :class:`DetectionPolicy`);
the attacker's expected gain under a policy is

    u_undetected - pi * (u_undetected + u_detected)

which is the only payoff expression the rest of the package needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    BadDistribution,
    BadPrior,
    DegenerateDenominator,
    EmptyVectorSet,
    GameValidationError,
    ProfileOutOfBox,
    TypeOutOfRange,
)

PROB_TOL = 1e-9
DEFAULT_EPS_DENOM = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GameSpec:
    """Full description of one game instance.

    Vectors are identified by their position in the payoff arrays (ids
    ``0 .. num_vectors - 1``); ``features`` is optional metadata and never
    enters the payoff algebra.  Instances should be produced through
    :func:`validate_game`, which normalizes the distributions and freezes
    the arrays; all operations treat a validated game as immutable and
    safe to share across workers.
    """

    p_attack: float
    type_priors: np.ndarray      # (m,)
    u_undetected: np.ndarray     # (m, n)
    u_detected: np.ndarray       # (m, n)
    false_alarm_cost: np.ndarray  # (n,)
    p0: np.ndarray               # (n,)
    features: tuple[tuple[float, ...], ...] | None = None
    eps_denom: float = DEFAULT_EPS_DENOM
    name: str = ""
    validated: bool = field(default=False, compare=False)

    @property
    def num_types(self) -> int:
        return int(self.type_priors.shape[0])

    @property
    def num_vectors(self) -> int:
        return int(self.p0.shape[0])

    @property
    def denominators(self) -> np.ndarray:
        """Per (type, vector) sums u_undetected + u_detected, shape (m, n)."""
        return self.u_undetected + self.u_detected


class GainBounds(NamedTuple):
    """Componentwise box for attacker gain profiles."""

    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class UtilityProfile:
    """A per-type gain cap ``g`` together with its box bounds."""

    g: np.ndarray
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray

    def __post_init__(self):
        g = _readonly(self.g)
        lo = _readonly(self.lower_bounds)
        hi = _readonly(self.upper_bounds)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "lower_bounds", lo)
        object.__setattr__(self, "upper_bounds", hi)
        if np.any(lo > hi + PROB_TOL):
            raise ProfileOutOfBox("lower_bounds exceed upper_bounds")
        if np.any(g < lo - PROB_TOL) or np.any(g > hi + PROB_TOL):
            raise ProfileOutOfBox(
                f"profile {g} outside box [{lo}, {hi}]"
            )

    @property
    def num_types(self) -> int:
        return int(self.g.shape[0])


@dataclass(frozen=True)
class DetectionPolicy:
    """Per-vector probability that the defender flags the vector."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        if np.any(pi < -PROB_TOL) or np.any(pi > 1.0 + PROB_TOL):
            raise GameValidationError("detection probabilities outside [0, 1]")
        object.__setattr__(self, "pi", _readonly(np.clip(pi, 0.0, 1.0)))

    def __getitem__(self, vector_id: int) -> float:
        return float(self.pi[vector_id])

    def __len__(self) -> int:
        return int(self.pi.shape[0])


@dataclass(frozen=True)
class AttackStrategy:
    """One probability distribution over vectors per attacker type."""

    alpha: np.ndarray   # (m, n)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        if alpha.ndim != 2:
            raise GameValidationError("alpha must have shape (num_types, num_vectors)")
        if np.any(alpha < -PROB_TOL):
            raise BadDistribution("attack strategy has negative mass")
        sums = alpha.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise BadDistribution(f"attack strategy rows sum to {sums}, not 1")
        object.__setattr__(self, "alpha", _readonly(alpha))

    @classmethod
    def point_masses(cls, num_vectors: int, vector_ids) -> "AttackStrategy":
        """One pure strategy per type, mass 1 on the given vector ids."""
        ids = np.asarray(vector_ids, dtype=int)
        alpha = np.zeros((ids.shape[0], num_vectors))
        alpha[np.arange(ids.shape[0]), ids] = 1.0
        return cls(alpha)


def _check_probability_vector(p: np.ndarray, what: str) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise BadDistribution(f"{what} must be one-dimensional")
    if np.any(p < 0):
        raise BadDistribution(f"{what} has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise BadDistribution(f"{what} sums to {total!r}, not 1")
    return p / total


def validate_game(raw: GameSpec) -> GameSpec:
    """Check every structural invariant and return a normalized game.

    Probability vectors are renormalized exactly after the tolerance
    check so downstream algebra can rely on exact sums.  Raises
    :class:`EmptyVectorSet`, :class:`BadPrior`, :class:`BadDistribution`,
    :class:`DegenerateDenominator` or :class:`GameValidationError`.
    """
    uu = np.atleast_2d(np.asarray(raw.u_undetected, dtype=np.float64))
    ud = np.atleast_2d(np.asarray(raw.u_detected, dtype=np.float64))
    cfa = np.asarray(raw.false_alarm_cost, dtype=np.float64)
    p0 = np.asarray(raw.p0, dtype=np.float64)
    priors = np.asarray(raw.type_priors, dtype=np.float64)

    n = p0.shape[0] if p0.ndim == 1 else 0
    if n == 0:
        raise EmptyVectorSet("game has no vectors")
    m = priors.shape[0] if priors.ndim == 1 else 0
    if m == 0:
        raise BadDistribution("type_priors is empty")
    if not 0.0 <= float(raw.p_attack) <= 1.0:
        raise BadPrior(f"p_attack={raw.p_attack!r} outside [0, 1]")
    if uu.shape != (m, n) or ud.shape != (m, n):
        raise GameValidationError(
            f"payoff arrays must have shape {(m, n)}; "
            f"got {uu.shape} and {ud.shape}"
        )
    if cfa.shape != (n,):
        raise GameValidationError(f"false_alarm_cost must have shape {(n,)}")
    if np.any(cfa < 0):
        raise GameValidationError("false_alarm_cost has negative entries")
    if raw.features is not None and len(raw.features) != n:
        raise GameValidationError("features length does not match vector count")

    priors = _check_probability_vector(priors, "type_priors")
    p0 = _check_probability_vector(p0, "p0")

    eps = float(raw.eps_denom)
    if eps <= 0:
        raise GameValidationError("eps_denom must be positive")
    den = uu + ud
    bad = np.argwhere(den < eps)
    if bad.size:
        i, v = (int(x) for x in bad[0])
        raise DegenerateDenominator(
            f"u_undetected + u_detected = {den[i, v]!r} < {eps!r} "
            f"at type {i}, vector {v}"
        )

    return replace(
        raw,
        p_attack=float(raw.p_attack),
        type_priors=_readonly(priors),
        u_undetected=_readonly(uu),
        u_detected=_readonly(ud),
        false_alarm_cost=_readonly(cfa),
        p0=_readonly(p0),
        eps_denom=eps,
        validated=True,
    )


def gain_bounds(game: GameSpec) -> GainBounds:
    """Componentwise gain box: lower = max(-u_detected), upper = max(u_undetected)."""
    return GainBounds(
        lower=_readonly((-game.u_detected).max(axis=1)),
        upper=_readonly(game.u_undetected.max(axis=1)),
    )


def make_profile(game: GameSpec, g) -> UtilityProfile:
    """Attach the game's gain box to a raw profile vector."""
    lo, hi = gain_bounds(game)
    return UtilityProfile(g=np.asarray(g, dtype=np.float64), lower_bounds=lo, upper_bounds=hi)


def _check_type(game: GameSpec, type_index: int) -> int:
    i = int(type_index)
    if not 0 <= i < game.num_types:
        raise TypeOutOfRange(
            f"type index {type_index} outside [0, {game.num_types})"
        )
    return i


def attacker_payoff(
    game: GameSpec,
    type_index: int,
    strategy: AttackStrategy | int,
    policy: DetectionPolicy,
) -> float:
    """Expected gain of a type under a strategy (or pure vector) and policy."""
    i = _check_type(game, type_index)
    values = game.u_undetected[i] - policy.pi * game.denominators[i]
    if isinstance(strategy, AttackStrategy):
        return float(strategy.alpha[i] @ values)
    return float(values[int(strategy)])


def defender_payoff(
    game: GameSpec,
    strategy: AttackStrategy,
    policy: DetectionPolicy,
) -> float:
    """Prior-averaged defender payoff; exact negative mirror of the attackers'.

    Built from :func:`attacker_payoff` term by term so the zero-sum
    identity holds to machine precision.
    """
    attack_term = sum(
        float(game.type_priors[i]) * attacker_payoff(game, i, strategy, policy)
        for i in range(game.num_types)
    )
    false_alarm = float((game.false_alarm_cost * game.p0) @ policy.pi)
    return -game.p_attack * attack_term - (1.0 - game.p_attack) * false_alarm


def best_response(
    game: GameSpec, type_index: int, policy: DetectionPolicy
) -> tuple[int, float]:
    """Best pure vector and its value for one type; ties go to the lowest id."""
    i = _check_type(game, type_index)
    values = game.u_undetected[i] - policy.pi * game.denominators[i]
    v = int(np.argmax(values))   # first maximum = lowest id
    return v, float(values[v])
