"""Exact equilibrium computation in the gain-profile coordinate.

The defender's minimax strategy is characterized by an m-vector ``G`` of
per-type gain caps.  Given ``G``, the cheapest policy holding every
attacker type at or below its cap is

    pi_G(v) = max(0, max_i (u_undetected[i, v] - G_i) / (u_u + u_d)[i, v])

and the defender's guaranteed payoff when playing ``pi_G`` is the
concave piecewise-linear

    U_D(G) = -p_attack * priors @ G
             - (1 - p_attack) * sum_v c_fa(v) P0(v) pi_G(v).

``solve_defender`` maximizes ``U_D`` exactly through its linear program;
``solve_attacker`` recovers an equilibrium attack strategy from the
feasibility system expressing the defender's first-order conditions; and
``verify_bne`` checks both sides of the equilibrium definition on any
candidate pair.  ``brute_force_oracle`` is an independent grid evaluator
kept free of the production code paths so tests can compare the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._profilelp import ProfileProblem, minimize_profile
from .errors import GridTooLarge, ProfileOutOfBox, SolverFailure
from .game import (
    AttackStrategy,
    DetectionPolicy,
    GameSpec,
    UtilityProfile,
    best_response,
    gain_bounds,
    make_profile,
)
from .lp import assert_optimal, solve_lp

BOX_TOL = 1e-9
# Band widths classifying float detection probabilities as exactly 0 or 1.
PI_ZERO_BAND = 1e-9
PI_ONE_BAND = 1.0 - 1e-9
ORACLE_GRID_GUARD = 10_000_000


class ClampStats:
    """Counts defensive clamps of pi_G above 1 (analytically impossible
    for in-box profiles; a nonzero count signals a numerics bug)."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


CLAMP_STATS = ClampStats()


@dataclass(frozen=True)
class EquilibriumSolution:
    g_max: UtilityProfile
    policy: DetectionPolicy
    value: float
    attacker: AttackStrategy | None = None


@dataclass(frozen=True)
class ThresholdClassifier:
    """Deterministic classifier flagging v whenever pi_G(v) >= threshold."""

    g: UtilityProfile
    threshold: float

    def classify(self, game: GameSpec, vector_id: int) -> int:
        v = int(vector_id)
        num = game.u_undetected[:, v] - self.g.g
        pi_v = max(0.0, float((num / game.denominators[:, v]).max()))
        return int(pi_v >= self.threshold)

    def classify_all(self, game: GameSpec) -> np.ndarray:
        return (pi_of_G(game, self.g).pi >= self.threshold).astype(np.int8)


def _check_profile(game: GameSpec, profile: UtilityProfile | np.ndarray) -> np.ndarray:
    lo, hi = gain_bounds(game)
    g = profile.g if isinstance(profile, UtilityProfile) else np.asarray(profile, dtype=np.float64)
    if g.shape != lo.shape:
        raise ProfileOutOfBox(f"profile has {g.shape[0]} types, game has {lo.shape[0]}")
    if np.any(g < lo - BOX_TOL) or np.any(g > hi + BOX_TOL):
        raise ProfileOutOfBox(f"profile {g} outside box [{lo}, {hi}]")
    return g


def pi_of_G(game: GameSpec, profile: UtilityProfile | np.ndarray) -> DetectionPolicy:
    """Optimal probability of detection for a gain profile inside the box."""
    g = _check_profile(game, profile)
    ratios = (game.u_undetected - g[:, None]) / game.denominators
    pi = np.maximum(ratios.max(axis=0), 0.0)
    over = pi > 1.0 + 1e-12
    if np.any(over):
        CLAMP_STATS.count += int(over.sum())
    np.minimum(pi, 1.0, out=pi)
    return DetectionPolicy(pi)


def min_gain(game: GameSpec, profile: UtilityProfile | np.ndarray) -> float:
    """Guaranteed defender payoff U_D at the policy pi_G."""
    g = _check_profile(game, profile)
    policy = pi_of_G(game, g if isinstance(profile, np.ndarray) else profile)
    cost = float((game.false_alarm_cost * game.p0) @ policy.pi)
    return float(-game.p_attack * (game.type_priors @ g) - (1.0 - game.p_attack) * cost)


def defender_guarantee(game: GameSpec, profile: UtilityProfile | np.ndarray) -> float:
    """Worst-case defender payoff when playing pi_G against best responders.

    Always at least U_D(G): each type's best response against pi_G is
    capped by G_i, so this quantity dominates ``min_gain``.
    """
    policy = pi_of_G(game, profile)
    attack = sum(
        float(game.type_priors[i]) * best_response(game, i, policy)[1]
        for i in range(game.num_types)
    )
    cost = float((game.false_alarm_cost * game.p0) @ policy.pi)
    return float(-game.p_attack * attack - (1.0 - game.p_attack) * cost)


def _profile_problem(game: GameSpec) -> ProfileProblem:
    lo, hi = gain_bounds(game)
    return ProfileProblem(
        attack_weights=game.p_attack * game.type_priors,
        unit_uu=np.ascontiguousarray(game.u_undetected.T),
        unit_den=np.ascontiguousarray(game.denominators.T),
        unit_weights=(1.0 - game.p_attack) * game.false_alarm_cost * game.p0,
        lower=lo,
        upper=hi,
    )


def solve_defender(game: GameSpec, engine: str = "auto") -> EquilibriumSolution:
    """Maximize U_D exactly and return the equilibrium policy pi_{G_max}.

    The returned policy is recomputed from the optimal profile rather
    than read off the LP's detection variables, so the pi_G identity
    holds exactly; the stored value is ``min_gain(g_max)``.
    """
    sol = minimize_profile(_profile_problem(game), engine=engine)
    profile = make_profile(game, sol.g)
    value = min_gain(game, profile)
    if abs(value + sol.value) > 1e-6 * (1.0 + abs(value)):
        raise SolverFailure(
            f"equilibrium value mismatch: LP {-sol.value!r} vs recomputed {value!r}"
        )
    return EquilibriumSolution(g_max=profile, policy=pi_of_G(game, profile), value=value)


def solve_attacker(
    game: GameSpec,
    solution: EquilibriumSolution,
    tol_support: float = 1e-7,
    tol_balance: float = 1e-6,
    engine: str = "auto",
) -> AttackStrategy:
    """Recover an equilibrium attack strategy against the minimax policy.

    Solves the feasibility program: per-type simplex constraints, zero
    mass off the best-response support (within ``tol_support``), and the
    detection-derivative balance conditions, as equalities on vectors
    with interior detection probability and one-sided bounds where the
    probability saturates at 0 or 1 (within ``tol_balance``).  The
    feasible set can contain many strategies; the solver's first vertex
    is returned.
    """
    pi_star = solution.policy.pi
    m, n = game.num_types, game.num_vectors
    values = game.u_undetected - pi_star[None, :] * game.denominators
    g_caps = values.max(axis=1)
    support = values >= (g_caps[:, None] - tol_support)

    if game.p_attack == 0.0:
        return AttackStrategy.point_masses(n, values.argmax(axis=1))

    risk = (1.0 - game.p_attack) / game.p_attack * game.false_alarm_cost * game.p0
    zero_band = pi_star < PI_ZERO_BAND
    one_band = pi_star > PI_ONE_BAND
    interior = ~zero_band & ~one_band
    # Shrink the balance band a hair below the verification tolerance so
    # LP feasibility noise cannot push residuals past it.
    band = max(tol_balance - 1e-8, tol_balance / 2.0)

    active = support.any(axis=0)
    inactive = ~active
    if np.any(interior & inactive & (risk > band)) or np.any(
        one_band & inactive & (risk > band)
    ):
        raise SolverFailure(
            "balance conditions require attack mass on a vector outside "
            "every best-response support; the policy is not minimax"
        )

    # One LP variable per (type, supported vector).
    type_idx, vec_idx = np.nonzero(support)
    n_vars = type_idx.shape[0]
    col_of = {(i, v): j for j, (i, v) in enumerate(zip(type_idx, vec_idx))}

    a_eq = np.zeros((m, n_vars))
    a_eq[type_idx, np.arange(n_vars)] = 1.0
    b_eq = np.ones(m)

    coef = game.type_priors[type_idx] * game.denominators[type_idx, vec_idx]
    rows_ub: list[np.ndarray] = []
    rhs_ub: list[float] = []
    for v in np.flatnonzero(active):
        cols = [col_of[(i, v)] for i in range(m) if support[i, v]]
        row = np.zeros(n_vars)
        row[cols] = coef[cols]
        if interior[v] or zero_band[v]:
            rows_ub.append(row)
            rhs_ub.append(risk[v] + band)
        if interior[v] or one_band[v]:
            rows_ub.append(-row)
            rhs_ub.append(-(risk[v] - band))

    res = solve_lp(
        np.zeros(n_vars),
        a_ub=np.array(rows_ub) if rows_ub else None,
        b_ub=np.array(rhs_ub) if rhs_ub else None,
        a_eq=a_eq,
        b_eq=b_eq,
        lower=np.zeros(n_vars),
        upper=np.ones(n_vars),
        engine=engine,
    )
    assert_optimal(res, "attacker feasibility LP")

    alpha = np.zeros((m, n))
    alpha[type_idx, vec_idx] = np.maximum(res.x, 0.0)
    alpha /= alpha.sum(axis=1, keepdims=True)
    return AttackStrategy(alpha)


@dataclass(frozen=True)
class BneReport:
    """Outcome of checking a strategy pair against the equilibrium conditions."""

    best_response_gaps: np.ndarray     # (m,) attacker-side optimality gaps
    balance_residuals: np.ndarray      # (n,) defender-side derivative residuals
    pi_bands: np.ndarray               # (n,) 0 = pi==0 band, 1 = interior, 2 = pi==1 band
    tol: float
    passed: bool
    max_gap: float
    max_balance_violation: float
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "tol": self.tol,
            "max_best_response_gap": self.max_gap,
            "max_balance_violation": self.max_balance_violation,
            "best_response_gaps": [float(x) for x in self.best_response_gaps],
            "notes": list(self.notes),
        }


def verify_bne(
    game: GameSpec,
    strategy: AttackStrategy,
    policy: DetectionPolicy,
    tol: float = 1e-6,
) -> BneReport:
    """Report how far (strategy, policy) is from a Bayesian Nash equilibrium.

    Checks (a) per-type attacker optimality: the gap between the best
    pure-vector payoff and the played payoff, and (b) the defender's
    first-order balance between detection risk and deterred attack mass,
    classified by whether the detection probability sits at 0, inside
    (0, 1), or at 1.  Always returns a report; ``passed`` summarizes it.
    """
    pi = policy.pi
    values = game.u_undetected - pi[None, :] * game.denominators
    gaps = values.max(axis=1) - np.einsum("iv,iv->i", strategy.alpha, values)

    weighted = game.type_priors @ (strategy.alpha * game.denominators)
    if game.p_attack > 0.0:
        residuals = weighted - (1.0 - game.p_attack) / game.p_attack * (
            game.false_alarm_cost * game.p0
        )
        notes: tuple[str, ...] = ()
    else:
        # Without attacks the balance conditions reduce to the raw
        # false-alarm derivative; report that instead.
        residuals = -(1.0 - game.p_attack) * game.false_alarm_cost * game.p0
        notes = ("p_attack=0: residuals are unscaled false-alarm derivatives",)

    bands = np.ones(game.num_vectors, dtype=np.int8)
    bands[pi < PI_ZERO_BAND] = 0
    bands[pi > PI_ONE_BAND] = 2

    guard = tol + 2e-9
    viol = np.zeros(game.num_vectors)
    viol[bands == 0] = np.maximum(residuals[bands == 0], 0.0)
    viol[bands == 1] = np.abs(residuals[bands == 1])
    viol[bands == 2] = np.maximum(-residuals[bands == 2], 0.0)
    max_viol = float(viol.max()) if viol.size else 0.0
    max_gap = float(gaps.max())
    passed = bool(max_gap <= guard and max_viol <= guard)
    return BneReport(
        best_response_gaps=gaps,
        balance_residuals=residuals,
        pi_bands=bands,
        tol=tol,
        passed=passed,
        max_gap=max_gap,
        max_balance_violation=max_viol,
        notes=notes,
    )


def _grid_axes(game: GameSpec, resolution: float) -> list[np.ndarray]:
    lo, hi = gain_bounds(game)
    if not 0.0 < resolution <= 1.0:
        raise GridTooLarge(f"resolution {resolution!r} outside (0, 1]")
    intervals = max(1, round(1.0 / resolution))
    axes = []
    for i in range(game.num_types):
        if hi[i] - lo[i] <= 0.0:
            axes.append(np.array([lo[i]]))
        else:
            axes.append(np.linspace(lo[i], hi[i], intervals + 1))
    return axes


def brute_force_oracle(
    game: GameSpec, resolution: float
) -> tuple[UtilityProfile, float]:
    """Grid-search U_D by direct summation, independently of the LP path.

    ``resolution`` is the grid pitch as a fraction of each coordinate's
    box range (0.01 puts 101 points on every axis).  The implementation
    re-derives U_D inline rather than calling the production policy
    code, so it can serve as an oracle for it.  Guarded to m <= 3 and
    at most 1e7 grid points.
    """
    m = game.num_types
    if m > 3:
        raise GridTooLarge(f"oracle supports m <= 3, game has m={m}")
    axes = _grid_axes(game, resolution)
    total = math.prod(len(ax) for ax in axes)
    if total > ORACLE_GRID_GUARD:
        raise GridTooLarge(f"grid of {total} points exceeds {ORACLE_GRID_GUARD}")

    grid = np.stack(
        [g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1
    )  # (P, m), lexicographic order

    uu = game.u_undetected
    den = game.u_undetected + game.u_detected
    weights = (1.0 - game.p_attack) * game.false_alarm_cost * game.p0
    pa, priors = game.p_attack, game.type_priors

    best_value = -np.inf
    best_point: np.ndarray | None = None
    chunk = max(1, int(2_000_000 // max(1, game.num_vectors)))
    for start in range(0, grid.shape[0], chunk):
        pts = grid[start : start + chunk]                       # (P, m)
        ratios = (uu[None, :, :] - pts[:, :, None]) / den[None, :, :]
        pi = np.maximum(ratios.max(axis=1), 0.0)                # (P, n)
        vals = -pa * (pts @ priors) - pi @ weights
        j = int(np.argmax(vals))
        if vals[j] > best_value:
            best_value = float(vals[j])
            best_point = pts[j]
    assert best_point is not None
    return make_profile(game, best_point), best_value


def oracle_gap_bound(game: GameSpec, resolution: float) -> float:
    """Lipschitz bound on |LP optimum - grid optimum| for the oracle grid.

    Per coordinate, |dU_D/dG_i| <= p_a p_i + (1-p_a) sum_v c_fa P0 / den;
    the false-alarm part is shared across coordinates because only the
    attaining type contributes at each vector.
    """
    lo, hi = gain_bounds(game)
    axes = _grid_axes(game, resolution)
    steps = np.array(
        [(h - l) / (len(ax) - 1) if len(ax) > 1 else 0.0 for ax, l, h in zip(axes, lo, hi)]
    )
    den_min = (game.u_undetected + game.u_detected).min(axis=0)
    cost_rate = float((game.false_alarm_cost * game.p0 / den_min).sum())
    return float(
        game.p_attack * (game.type_priors @ steps)
        + (1.0 - game.p_attack) * steps.max(initial=0.0) * cost_rate
    )


def sample_threshold_classifier(
    profile: UtilityProfile, rng: np.random.Generator
) -> ThresholdClassifier:
    """Draw a uniform threshold; the resulting deterministic classifiers
    average back to pi_G when the threshold is redrawn each time."""
    return ThresholdClassifier(g=profile, threshold=float(rng.random()))


def threshold_indicator_integral(pi_value: float) -> float:
    """Closed form of the sweep integral over thresholds t in [0, 1].

    The detection indicator 1{pi >= t} is 1 exactly on [0, pi], so its
    integral is pi itself (clipped to the unit interval).
    """
    return min(max(float(pi_value), 0.0), 1.0)
