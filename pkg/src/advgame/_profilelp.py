"""Shared minimizer for the package's recurring piecewise-linear program.

The exact equilibrium, the sample-average training step and the online
hindsight comparator all minimize the same convex function of the gain
profile ``G``:

    f(G) = a @ G + sum_r w_r * max(0, max_i (uu[r, i] - G_i) / den[r, i])

over the box ``lower <= G <= upper``, where each "unit" ``r`` is an
attack vector or a sampled record carrying payoffs ``uu`` and
denominators ``den``, and ``w_r >= 0`` weights its false-alarm cost.
The equivalent linear program introduces one detection variable per
unit:

    minimize   a @ G + w @ pi
    subject to G_i + den[r, i] * pi_r >= uu[r, i]      for all r, i
               0 <= pi_r <= 1,  lower <= G <= upper.

Constraints with ``uu[r, i] <= lower_i`` are implied by the box and are
pruned; units with ``w_r == 0`` never affect the optimum (their
detection variable is free up to 1, which the box lower bound already
accommodates) and are dropped.

Small instances are solved directly.  Large ones (hundreds of thousands
of units) never materialize the per-unit variables: for a fixed ``G``
each detection variable has the closed-form optimum ``pi_G``, so the
program collapses to minimizing ``a @ G + phi(G)`` where
``phi(G) = sum_r w_r pi_G(r)`` is convex piecewise-linear with a cheap
subgradient.  A cutting-plane loop on a master program in just m + 1
variables (Benders decomposition with closed-form subproblems) then
converges with a sandwich certificate: the master value is a global
lower bound, the best evaluated point an upper bound, and the loop only
stops when they meet to 1e-9 relative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import SolverFailure
from .lp import assert_optimal, solve_lp

# Above this many units the direct LP gives way to the cutting-plane loop.
DIRECT_UNIT_LIMIT = 25_000
CUT_GAP_TOL = 1e-9
CUT_MAX_ITERS = 3000
WARM_START_STEPS = 60


@dataclass(frozen=True)
class ProfileProblem:
    attack_weights: np.ndarray   # (m,) nonnegative
    unit_uu: np.ndarray          # (R, m)
    unit_den: np.ndarray         # (R, m) strictly positive
    unit_weights: np.ndarray     # (R,) nonnegative
    lower: np.ndarray            # (m,)
    upper: np.ndarray            # (m,)

    @property
    def num_types(self) -> int:
        return int(self.attack_weights.shape[0])

    @property
    def num_units(self) -> int:
        return int(self.unit_weights.shape[0])


@dataclass
class ProfileSolution:
    g: np.ndarray
    value: float
    engine: str
    cuts: int = 0


def profile_pi(prob: ProfileProblem, g: np.ndarray, unit_ids=None) -> np.ndarray:
    uu = prob.unit_uu if unit_ids is None else prob.unit_uu[unit_ids]
    den = prob.unit_den if unit_ids is None else prob.unit_den[unit_ids]
    if uu.shape[0] == 0:
        return np.zeros(0)
    ratios = (uu - g[None, :]) / den
    return np.maximum(ratios.max(axis=1), 0.0)


def profile_value(prob: ProfileProblem, g: np.ndarray) -> float:
    cost = float(prob.unit_weights @ profile_pi(prob, g))
    return float(prob.attack_weights @ g) + cost


def _cost_and_subgradient(prob: ProfileProblem, g: np.ndarray) -> tuple[float, np.ndarray]:
    """Value and a subgradient of phi(G) = sum_r w_r * pi_G(r)."""
    ratios = (prob.unit_uu - g[None, :]) / prob.unit_den
    attaining = ratios.argmax(axis=1)
    rows = np.arange(ratios.shape[0])
    piv = ratios[rows, attaining]
    active = piv > 0.0
    grad = np.zeros(prob.num_types)
    if np.any(active):
        contrib = prob.unit_weights[active] / prob.unit_den[rows[active], attaining[active]]
        np.subtract.at(grad, attaining[active], contrib)
    return float(prob.unit_weights[active] @ piv[active]), grad


def _direct_lp(prob: ProfileProblem, unit_ids: np.ndarray, engine: str) -> ProfileSolution:
    m = prob.num_types
    r = unit_ids.shape[0]
    uu = prob.unit_uu[unit_ids]
    den = prob.unit_den[unit_ids]

    # Constraint (r, i) is real only when uu exceeds the box lower bound.
    keep = uu > prob.lower[None, :]
    unit_idx, type_idx = np.nonzero(keep)
    n_rows = unit_idx.shape[0]

    c = np.concatenate([prob.attack_weights, prob.unit_weights[unit_ids]])
    lower = np.concatenate([prob.lower, np.zeros(r)])
    upper = np.concatenate([prob.upper, np.ones(r)])

    if n_rows:
        rows = np.arange(n_rows)
        data = np.concatenate([-np.ones(n_rows), -den[unit_idx, type_idx]])
        rr = np.concatenate([rows, rows])
        cc = np.concatenate([type_idx, m + unit_idx])
        a_ub = sp.coo_matrix((data, (rr, cc)), shape=(n_rows, m + r)).tocsr()
        b_ub = -uu[unit_idx, type_idx]
        if engine == "dense" or (engine == "auto" and n_rows <= 600):
            a_ub = a_ub.toarray()
    else:
        a_ub, b_ub = None, None

    sol = assert_optimal(
        solve_lp(c, a_ub=a_ub, b_ub=b_ub, lower=lower, upper=upper, engine=engine),
        "profile LP",
    )
    g = np.clip(sol.x[:m], prob.lower, prob.upper)
    return ProfileSolution(g=g, value=profile_value(prob, g), engine=sol.engine)


def minimize_profile(prob: ProfileProblem, engine: str = "auto") -> ProfileSolution:
    if np.any(prob.unit_den <= 0):
        raise SolverFailure("profile LP requires strictly positive denominators")
    weights = prob.unit_weights
    nonzero = np.flatnonzero(weights > 0.0)

    if nonzero.size == 0:
        g = prob.lower.copy()
        return ProfileSolution(g=g, value=profile_value(prob, g), engine="closed-form")

    if engine != "auto" or nonzero.size <= DIRECT_UNIT_LIMIT:
        return _direct_lp(prob, nonzero, engine)
    return _cutting_planes(prob)


def _cutting_planes(prob: ProfileProblem) -> ProfileSolution:
    """Benders-style cutting planes on the m-dimensional master program.

    Minimizes a @ G + z subject to z >= phi(G_j) + s_j @ (G - G_j) for
    every visited point G_j, z >= 0 and the box.  Each cut is a global
    underestimator of phi, so the master value is a valid lower bound on
    the true optimum while the best evaluated point is an upper bound;
    the loop returns only once they agree to CUT_GAP_TOL relative.
    """
    lo, hi = prob.lower, prob.upper
    a = prob.attack_weights
    m = prob.num_types
    scale = float(np.linalg.norm(hi - lo)) or 1.0

    cut_slopes: list[np.ndarray] = []   # s_j
    cut_offsets: list[float] = []       # phi_j - s_j @ G_j

    def add_cut(g: np.ndarray) -> float:
        phi, slope = _cost_and_subgradient(prob, g)
        cut_slopes.append(slope)
        cut_offsets.append(phi - float(slope @ g))
        return float(a @ g) + phi

    best_g = 0.5 * (lo + hi)
    best_value = add_cut(best_g)
    # A short subgradient descent seeds the cut model with informative
    # points before the master starts jumping to model minimizers.
    g = best_g.copy()
    for t in range(1, WARM_START_STEPS + 1):
        slope = a + cut_slopes[-1]
        norm = float(np.linalg.norm(slope))
        if norm < 1e-15:
            break
        g = np.clip(g - (0.2 * scale / np.sqrt(t)) * (slope / norm), lo, hi)
        value = add_cut(g)
        if value < best_value:
            best_value, best_g = value, g.copy()

    for _ in range(CUT_MAX_ITERS):
        n_cuts = len(cut_slopes)
        # Master variables: [G (m), z]; minimize a @ G + z.
        a_ub = np.empty((n_cuts, m + 1))
        a_ub[:, :m] = np.asarray(cut_slopes)
        a_ub[:, m] = -1.0
        master = solve_lp(
            c=np.concatenate([a, [1.0]]),
            a_ub=a_ub,
            b_ub=-np.asarray(cut_offsets),
            lower=np.concatenate([lo, [0.0]]),
            upper=np.concatenate([hi, [np.inf]]),
            engine="dense" if n_cuts <= 800 else "highs",
        )
        if not master.ok:
            raise SolverFailure(f"cut master LP returned {master.status!r}")
        lower_bound = master.objective
        g = np.clip(master.x[:m], lo, hi)
        value = add_cut(g)
        if value < best_value:
            best_value, best_g = value, g.copy()
        if best_value - lower_bound <= CUT_GAP_TOL * (1.0 + abs(best_value)):
            return ProfileSolution(
                g=best_g, value=best_value, engine="cutting-plane", cuts=len(cut_slopes)
            )
    raise SolverFailure(
        f"cutting planes did not close the gap in {CUT_MAX_ITERS} iterations"
    )
