"""Online learning against best-responding attackers.

At each step the defender commits to a detection policy; with
probability 1 - p_attack a non-attack vector arrives from P0, otherwise
an attacker of a prior-drawn type plays a best response to the posted
policy.  The defender observes the type after classification and pays,
in expectation over the classification coin, the attacker's gain (on
attacks) or the false-alarm cost times the detection probability (on
non-attacks).

Two learners are provided.  The efficient one performs projected
subgradient descent directly on the m-dimensional gain profile with
step 1/sqrt(t): attacks of type i contribute the basis gradient e_i,
non-attacks contribute the subgradient of pi_G(v) * c_fa(v) (zero at
the kink, otherwise through the lowest attaining type).  The naive
baseline descends on the full per-vector detection function, whose
regret constants grow with the vector-set size.

Regret is measured against the best fixed profile in hindsight,
computed exactly by the same linear program family as the equilibrium,
with one detection variable per distinct observed non-attack vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._profilelp import ProfileProblem, minimize_profile
from .errors import VectorSetTooLarge
from .game import (
    DetectionPolicy,
    GameSpec,
    UtilityProfile,
    best_response,
    gain_bounds,
    make_profile,
)
from .equilibrium import pi_of_G

NAIVE_MAX_VECTORS = 100_000
LOSS_DOMINATION_TOL = 1e-9


class Event(NamedTuple):
    """One environment arrival; type_index is None for non-attacks."""

    is_attack: bool
    type_index: int | None
    vector_id: int


@dataclass
class OnlineTrace:
    """Per-step record of one learner run.

    ``g`` holds the profile the learner played at each step (NaN for the
    naive learner, whose state lives in policy space).  Losses are
    expectations over the classification coin; the realized loss never
    exceeds the surrogate loss the learner descends on.
    """

    g: np.ndarray              # (T, m)
    event_kind: np.ndarray     # (T,) 0 = non-attack, 1 = attack
    type_index: np.ndarray     # (T,) attacker type, -1 for non-attacks
    vector_id: np.ndarray      # (T,)
    realized_loss: np.ndarray  # (T,)
    surrogate_loss: np.ndarray  # (T,)
    algo: str
    horizon: int

    @property
    def cum_realized(self) -> np.ndarray:
        return np.cumsum(self.realized_loss)

    @property
    def cum_surrogate(self) -> np.ndarray:
        return np.cumsum(self.surrogate_loss)

    def check(self) -> None:
        bad = self.realized_loss > self.surrogate_loss + LOSS_DOMINATION_TOL
        if np.any(bad):
            t = int(np.flatnonzero(bad)[0])
            raise AssertionError(
                f"realized loss exceeds surrogate at step {t}: "
                f"{self.realized_loss[t]} > {self.surrogate_loss[t]}"
            )


@dataclass(frozen=True)
class RegretBound:
    """Constants of the projected-subgradient regret guarantee."""

    d: float
    l_const: float
    horizon: int

    def __post_init__(self):
        if self.d < 0 or self.l_const < 0:
            raise ValueError("bound constants must be nonnegative")


def regret_bound(bound: RegretBound) -> float:
    """Numeric bound D^2 sqrt(T)/2 + (sqrt(T) - 1/2) L^2."""
    root = np.sqrt(bound.horizon)
    return float(bound.d**2 * root / 2.0 + (root - 0.5) * bound.l_const**2)


def efficient_bound_constants(game: GameSpec, horizon: int) -> RegretBound:
    """D = box diameter, L = max(1, max c_fa / (u_u + u_d))."""
    lo, hi = gain_bounds(game)
    l_const = max(
        1.0, float((game.false_alarm_cost[None, :] / game.denominators).max())
    )
    return RegretBound(d=float(np.linalg.norm(hi - lo)), l_const=l_const, horizon=horizon)


def naive_bound_constants(game: GameSpec, horizon: int) -> RegretBound:
    """D^2 = |V|, L = max(max c_fa, max |u_u + u_d|)."""
    l_const = max(
        float(game.false_alarm_cost.max()), float(np.abs(game.denominators).max())
    )
    return RegretBound(
        d=float(np.sqrt(game.num_vectors)), l_const=l_const, horizon=horizon
    )


def _cdfs(game: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    return np.cumsum(game.type_priors), np.cumsum(game.p0)


def _draw_type(cdf: np.ndarray, rng: np.random.Generator) -> int:
    return min(int(np.searchsorted(cdf, rng.random(), side="right")), cdf.shape[0] - 1)


def environment_step(
    game: GameSpec, policy: DetectionPolicy, rng: np.random.Generator
) -> Event:
    """Draw one arrival: a P0 vector, or a best response of a drawn type."""
    prior_cdf, p0_cdf = _cdfs(game)
    if rng.random() < game.p_attack:
        i = _draw_type(prior_cdf, rng)
        v, _ = best_response(game, i, policy)
        return Event(True, i, v)
    return Event(False, None, _draw_type(p0_cdf, rng))


def rollout(
    game: GameSpec, policy: DetectionPolicy, steps: int, rng: np.random.Generator
) -> OnlineTrace:
    """Environment rollout under a fixed policy (no learning).

    Both loss columns hold the expected loss of the fixed policy; best
    responses are computed once per type since the policy never moves.
    """
    prior_cdf, p0_cdf = _cdfs(game)
    responses = [best_response(game, i, policy) for i in range(game.num_types)]
    fa_loss = game.false_alarm_cost * policy.pi
    kinds = np.zeros(steps, dtype=np.uint8)
    types = np.full(steps, -1, dtype=np.int32)
    vecs = np.zeros(steps, dtype=np.int64)
    loss = np.zeros(steps)
    for t in range(steps):
        if rng.random() < game.p_attack:
            i = _draw_type(prior_cdf, rng)
            v, value = responses[i]
            kinds[t], types[t], vecs[t], loss[t] = 1, i, v, value
        else:
            v = _draw_type(p0_cdf, rng)
            vecs[t], loss[t] = v, fa_loss[v]
    return OnlineTrace(
        g=np.full((steps, game.num_types), np.nan),
        event_kind=kinds,
        type_index=types,
        vector_id=vecs,
        realized_loss=loss,
        surrogate_loss=loss.copy(),
        algo="rollout",
        horizon=steps,
    )


def efficient_ogd_run(
    game: GameSpec,
    horizon: int,
    g_init: UtilityProfile | np.ndarray,
    rng: np.random.Generator,
    step_scale: float = 1.0,
) -> OnlineTrace:
    """Projected subgradient descent on the gain profile.

    The step size is ``step_scale / sqrt(t)``; the default scale of 1 is
    the analyzed schedule and ``step_scale`` exists only for exploration.
    Per step only the arriving vector's detection probability is needed,
    except on attack events where the attacker's best response requires
    one full sweep over the vector set.
    """
    lo, hi = gain_bounds(game)
    g0 = g_init.g if isinstance(g_init, UtilityProfile) else np.asarray(g_init, float)
    make_profile(game, g0)   # box check
    g = np.clip(g0.astype(np.float64), lo, hi)

    m, n = game.num_types, game.num_vectors
    uu, den = game.u_undetected, game.denominators
    cfa = game.false_alarm_cost
    prior_cdf, p0_cdf = _cdfs(game)

    g_hist = np.empty((horizon, m))
    kinds = np.zeros(horizon, dtype=np.uint8)
    types = np.full(horizon, -1, dtype=np.int32)
    vecs = np.zeros(horizon, dtype=np.int64)
    realized = np.zeros(horizon)
    surrogate = np.zeros(horizon)

    ratio_buf = np.empty((m, n))
    pi_buf = np.empty(n)
    val_buf = np.empty(n)

    for t in range(1, horizon + 1):
        idx = t - 1
        g_hist[idx] = g
        step = step_scale / np.sqrt(t)
        if rng.random() < game.p_attack:
            i = _draw_type(prior_cdf, rng)
            np.subtract(uu, g[:, None], out=ratio_buf)
            np.divide(ratio_buf, den, out=ratio_buf)
            ratio_buf.max(axis=0, out=pi_buf)
            np.maximum(pi_buf, 0.0, out=pi_buf)
            np.multiply(pi_buf, den[i], out=val_buf)
            np.subtract(uu[i], val_buf, out=val_buf)
            v = int(np.argmax(val_buf))
            kinds[idx], types[idx], vecs[idx] = 1, i, v
            realized[idx] = val_buf[v]
            surrogate[idx] = g[i]
            g[i] = min(max(g[i] - step, lo[i]), hi[i])
        else:
            v = _draw_type(p0_cdf, rng)
            vecs[idx] = v
            column = (uu[:, v] - g) / den[:, v]
            j = int(np.argmax(column))
            pi_v = column[j]
            if pi_v > 0.0:
                loss = pi_v * cfa[v]
                realized[idx] = surrogate[idx] = loss
                grad = -cfa[v] / den[j, v]
                g[j] = min(max(g[j] - step * grad, lo[j]), hi[j])
            # pi_v <= 0: zero loss and the zero subgradient; nothing moves.

    trace = OnlineTrace(
        g=g_hist,
        event_kind=kinds,
        type_index=types,
        vector_id=vecs,
        realized_loss=realized,
        surrogate_loss=surrogate,
        algo="efficient",
        horizon=horizon,
    )
    trace.check()
    if np.any(g_hist < lo[None, :] - 1e-12) or np.any(g_hist > hi[None, :] + 1e-12):
        raise AssertionError("profile left its box during the run")
    return trace


def naive_ogd_run(
    game: GameSpec,
    horizon: int,
    rng: np.random.Generator,
    pi_init: np.ndarray | None = None,
    step_scale: float = 1.0,
) -> OnlineTrace:
    """Projected subgradient descent on the full detection function.

    The decision variable is one probability per vector, so the run is
    guarded to vector sets that fit in memory.  Trace profiles are NaN:
    this learner has no gain-profile state.
    """
    n, m = game.num_vectors, game.num_types
    if n > NAIVE_MAX_VECTORS:
        raise VectorSetTooLarge(f"naive learner refuses |V|={n} > {NAIVE_MAX_VECTORS}")
    pi = np.zeros(n) if pi_init is None else np.clip(np.asarray(pi_init, float), 0.0, 1.0)
    pi = pi.copy()
    uu, den = game.u_undetected, game.denominators
    cfa = game.false_alarm_cost
    prior_cdf, p0_cdf = _cdfs(game)

    kinds = np.zeros(horizon, dtype=np.uint8)
    types = np.full(horizon, -1, dtype=np.int32)
    vecs = np.zeros(horizon, dtype=np.int64)
    realized = np.zeros(horizon)

    for t in range(1, horizon + 1):
        idx = t - 1
        step = step_scale / np.sqrt(t)
        if rng.random() < game.p_attack:
            i = _draw_type(prior_cdf, rng)
            values = uu[i] - pi * den[i]
            v = int(np.argmax(values))
            kinds[idx], types[idx], vecs[idx] = 1, i, v
            realized[idx] = values[v]
            pi[v] = min(max(pi[v] + step * den[i, v], 0.0), 1.0)
        else:
            v = _draw_type(p0_cdf, rng)
            vecs[idx] = v
            realized[idx] = pi[v] * cfa[v]
            pi[v] = min(max(pi[v] - step * cfa[v], 0.0), 1.0)

    # Attackers best-respond to the posted policy, so the surrogate the
    # baseline descends on coincides with the realized loss.
    return OnlineTrace(
        g=np.full((horizon, m), np.nan),
        event_kind=kinds,
        type_index=types,
        vector_id=vecs,
        realized_loss=realized,
        surrogate_loss=realized.copy(),
        algo="naive",
        horizon=horizon,
    )


@dataclass
class RegretResult:
    realized_regret: float
    surrogate_regret: float
    comparator: float
    g_star: UtilityProfile


def _hindsight_problem(trace: OnlineTrace, game: GameSpec) -> ProfileProblem:
    m = game.num_types
    attack_counts = np.zeros(m)
    attack_mask = trace.event_kind == 1
    for i in range(m):
        attack_counts[i] = np.sum(trace.type_index[attack_mask] == i)
    clean_ids, clean_counts = np.unique(
        trace.vector_id[~attack_mask], return_counts=True
    )
    lo, hi = gain_bounds(game)
    return ProfileProblem(
        attack_weights=attack_counts,
        unit_uu=np.ascontiguousarray(game.u_undetected[:, clean_ids].T),
        unit_den=np.ascontiguousarray(game.denominators[:, clean_ids].T),
        unit_weights=clean_counts * game.false_alarm_cost[clean_ids],
        lower=lo,
        upper=hi,
    )


def stackelberg_regret(
    trace: OnlineTrace, game: GameSpec, engine: str = "auto"
) -> RegretResult:
    """Cumulative losses minus the best fixed profile in hindsight.

    The comparator minimizes the summed surrogate losses over the gain
    box, solved exactly with one detection variable per distinct
    observed non-attack vector; by the domination identity the same
    number also lower-bounds any fixed policy's expected realized loss.
    """
    sol = minimize_profile(_hindsight_problem(trace, game), engine=engine)
    comparator = sol.value
    g_star = make_profile(game, sol.g)
    return RegretResult(
        realized_regret=float(trace.realized_loss.sum() - comparator),
        surrogate_regret=float(trace.surrogate_loss.sum() - comparator),
        comparator=float(comparator),
        g_star=g_star,
    )


def hindsight_step_losses(
    trace: OnlineTrace, game: GameSpec, g_star: UtilityProfile
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step (realized, surrogate) losses of the fixed hindsight profile.

    Used to turn total regret into cumulative regret curves: attack
    steps cost the best-response value (realized) and the profile cap
    (surrogate); non-attack steps cost the false-alarm expectation under
    pi at the hindsight profile.
    """
    policy = pi_of_G(game, g_star)
    responses = np.array(
        [best_response(game, i, policy)[1] for i in range(game.num_types)]
    )
    fa = game.false_alarm_cost * policy.pi

    realized = fa[trace.vector_id]
    surrogate = fa[trace.vector_id]
    attack = trace.event_kind == 1
    realized = np.where(attack, responses[trace.type_index], realized)
    surrogate = np.where(attack, g_star.g[trace.type_index], surrogate)
    return realized, surrogate


def distance_to_equilibrium(trace: OnlineTrace, g_max: UtilityProfile) -> np.ndarray:
    """Per-step L2 distance between the played profile and the optimum."""
    return np.linalg.norm(trace.g - g_max.g[None, :], axis=1)


def bernoulli_losses(
    trace: OnlineTrace, game: GameSpec, rng: np.random.Generator
) -> np.ndarray:
    """Sample concrete per-step losses from the classification coin.

    The expected losses in the trace determine each step's detection
    probability, so the trace suffices to draw the outcome that a single
    coin flip would have produced: detected attacks cost -u_detected,
    missed ones u_undetected, flagged non-attacks the false-alarm cost.
    """
    out = np.zeros(trace.horizon)
    coins = rng.random(trace.horizon)
    for t in range(trace.horizon):
        v = int(trace.vector_id[t])
        if trace.event_kind[t] == 1:
            i = int(trace.type_index[t])
            den = game.denominators[i, v]
            pi_v = (game.u_undetected[i, v] - trace.realized_loss[t]) / den
            detected = coins[t] < pi_v
            out[t] = -game.u_detected[i, v] if detected else game.u_undetected[i, v]
        else:
            cfa = game.false_alarm_cost[v]
            pi_v = trace.realized_loss[t] / cfa if cfa > 0 else 0.0
            out[t] = cfa if coins[t] < pi_v else 0.0
    return out
