"""Linear-program interface: in-repo dense simplex plus a sparse fallback.

``solve_lp`` minimizes ``c @ x`` subject to ``a_ub @ x <= b_ub``,
``a_eq @ x == b_eq`` and box bounds ``lower <= x <= upper`` (lower bounds
must be finite, upper bounds may be ``inf``).

Two engines sit behind the same interface:

* ``"dense"`` -- a two-phase full-tableau primal simplex implemented
  here.  Pivoting uses Dantzig's rule with lowest-index tie-breaking and
  switches to Bland's rule after a run of degenerate pivots, which keeps
  the method deterministic and cycle-safe.  Intended for the small dense
  programs this package mostly produces (hundreds of rows).
* ``"highs"`` -- scipy's HiGHS wrapper, used for instances whose dense
  tableau would be too large to pivot quickly.

``"auto"`` picks by problem size; the choice is a pure function of the
shapes, so runs stay reproducible.  Both engines are held to the same
feasibility/optimality tolerance of 1e-9 and are cross-checked against
each other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog as _scipy_linprog

from .errors import SolverFailure

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
# Consecutive degenerate pivots tolerated before switching to Bland's rule.
DEGENERATE_STREAK_LIMIT = 60
# "auto" uses the dense tableau only below these sizes.
DENSE_MAX_ROWS = 900
DENSE_MAX_CELLS = 1_200_000


@dataclass
class LPSolution:
    x: np.ndarray
    objective: float
    status: str            # "optimal" | "infeasible" | "unbounded"
    iterations: int
    engine: str

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _as_2d(a, n):
    if a is None:
        return np.zeros((0, n))
    if sp.issparse(a):
        return a
    return np.atleast_2d(np.asarray(a, dtype=np.float64))


def solve_lp(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    lower=None,
    upper=None,
    engine: str = "auto",
) -> LPSolution:
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    a_ub = _as_2d(a_ub, n)
    a_eq = _as_2d(a_eq, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=np.float64)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=np.float64)
    lower = np.zeros(n) if lower is None else np.asarray(lower, dtype=np.float64)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=np.float64)
    if not np.all(np.isfinite(lower)):
        raise ValueError("solve_lp requires finite lower bounds")
    if np.any(upper < lower - FEAS_TOL):
        return LPSolution(lower.copy(), np.nan, "infeasible", 0, engine)

    if engine == "auto":
        engine = _pick_engine(a_ub, a_eq, upper, lower, n)
    if engine == "highs":
        return _solve_highs(c, a_ub, b_ub, a_eq, b_eq, lower, upper)
    if engine == "dense":
        if sp.issparse(a_ub) or sp.issparse(a_eq):
            a_ub = a_ub.toarray() if sp.issparse(a_ub) else a_ub
            a_eq = a_eq.toarray() if sp.issparse(a_eq) else a_eq
        return _solve_dense(c, a_ub, b_ub, a_eq, b_eq, lower, upper)
    raise ValueError(f"unknown engine {engine!r}")


def _pick_engine(a_ub, a_eq, upper, lower, n) -> str:
    n_bound_rows = int(np.sum(np.isfinite(upper) & (upper > lower + FEAS_TOL)))
    rows = a_ub.shape[0] + a_eq.shape[0] + n_bound_rows
    cols = n + rows          # slacks + artificials, roughly
    if rows <= DENSE_MAX_ROWS and (rows + 1) * (cols + 1) <= DENSE_MAX_CELLS:
        return "dense"
    return "highs"


def _solve_highs(c, a_ub, b_ub, a_eq, b_eq, lower, upper) -> LPSolution:
    res = _scipy_linprog(
        c,
        A_ub=a_ub if a_ub.shape[0] else None,
        b_ub=b_ub if b_ub.shape[0] else None,
        A_eq=a_eq if a_eq.shape[0] else None,
        b_eq=b_eq if b_eq.shape[0] else None,
        bounds=np.column_stack([lower, upper]),
        method="highs",
    )
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status, "failed")
    x = res.x if res.x is not None else lower.copy()
    nit = int(getattr(res, "nit", 0) or 0)
    obj = float(res.fun) if res.fun is not None else np.nan
    return LPSolution(np.asarray(x, dtype=np.float64), obj, status, nit, "highs")


# ---------------------------------------------------------------------------
# dense two-phase tableau simplex
# ---------------------------------------------------------------------------


class _Tableau:
    """Full tableau over [structural | slack | artificial] columns.

    Row layout: one row per constraint, final row holds reduced costs;
    final column holds the rhs.  ``basis[i]`` is the variable occupying
    row ``i``.
    """

    def __init__(self, body: np.ndarray, rhs: np.ndarray, basis: np.ndarray):
        m, n = body.shape
        self.t = np.empty((m + 1, n + 1))
        self.t[:m, :n] = body
        self.t[:m, -1] = rhs
        self.t[-1] = 0.0
        self.basis = basis
        self.m = m
        self.n = n
        self.iterations = 0

    def set_objective(self, cost: np.ndarray) -> None:
        """Install a cost row and price out the current basis."""
        t = self.t
        t[-1, : self.n] = cost
        t[-1, -1] = 0.0
        for i, j in enumerate(self.basis):
            cj = t[-1, j]
            if cj != 0.0:
                t[-1] -= cj * t[i]

    def pivot(self, row: int, col: int) -> None:
        t = self.t
        t[row] /= t[row, col]
        col_vals = t[:, col].copy()
        col_vals[row] = 0.0
        t -= np.outer(col_vals, t[row])
        t[:, col] = 0.0
        t[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def run(self, allowed_cols: np.ndarray) -> str:
        """Minimize until optimal/unbounded; returns the final status."""
        t = self.t
        degenerate_streak = 0
        while True:
            costs = t[-1, : self.n]
            if degenerate_streak < DEGENERATE_STREAK_LIMIT:
                sub = np.where(allowed_cols, costs, np.inf)
                col = int(np.argmin(sub))
                if sub[col] >= -OPT_TOL:
                    return "optimal"
            else:
                # Bland: lowest-index column with negative reduced cost.
                neg = np.flatnonzero(allowed_cols & (costs < -OPT_TOL))
                if neg.size == 0:
                    return "optimal"
                col = int(neg[0])

            column = t[: self.m, col]
            rhs = t[: self.m, -1]
            pos = column > PIVOT_TOL
            if not np.any(pos):
                return "unbounded"
            ratios = np.where(pos, rhs / np.where(pos, column, 1.0), np.inf)
            best = ratios.min()
            # Lowest basis-variable index among tied rows (Bland-style exit).
            tied = np.flatnonzero(ratios <= best + FEAS_TOL * (1.0 + abs(best)))
            row = int(tied[np.argmin(self.basis[tied])])
            degenerate_streak = degenerate_streak + 1 if best <= FEAS_TOL else 0
            self.pivot(row, col)


def _solve_dense(c, a_ub, b_ub, a_eq, b_eq, lower, upper) -> LPSolution:
    n = c.shape[0]
    shift = lower

    # Shift to y = x - lower >= 0 and fold finite upper bounds into rows.
    b_ub = b_ub - a_ub @ shift if a_ub.shape[0] else b_ub
    b_eq = b_eq - a_eq @ shift if a_eq.shape[0] else b_eq
    span = upper - lower
    bounded = np.flatnonzero(np.isfinite(span))
    rows_bound = np.zeros((bounded.size, n))
    rows_bound[np.arange(bounded.size), bounded] = 1.0
    a_ub_full = np.vstack([a_ub, rows_bound]) if bounded.size else a_ub
    b_ub_full = np.concatenate([b_ub, span[bounded]]) if bounded.size else b_ub

    n_ub, n_eq = a_ub_full.shape[0], a_eq.shape[0]
    m = n_ub + n_eq
    if m == 0:
        # Pure box problem.
        if np.any((c < -OPT_TOL) & ~np.isfinite(upper)):
            return LPSolution(lower.copy(), np.nan, "unbounded", 0, "dense")
        x = np.where(c < 0, np.where(np.isfinite(upper), upper, lower), lower)
        return LPSolution(x, float(c @ x), "optimal", 0, "dense")

    # Equality form: [A_ub I; A_eq 0] with slack columns, rhs >= 0.
    body = np.zeros((m, n + n_ub))
    body[:n_ub, :n] = a_ub_full
    body[:n_ub, n : n + n_ub] = np.eye(n_ub)
    body[n_ub:, :n] = a_eq
    rhs = np.concatenate([b_ub_full, b_eq])
    neg = rhs < 0
    body[neg] *= -1.0
    rhs = np.abs(rhs)

    # Slacks with coefficient +1 can start basic; other rows need artificials.
    slack_ok = np.zeros(m, dtype=bool)
    slack_ok[:n_ub] = ~neg[:n_ub]
    art_rows = np.flatnonzero(~slack_ok)
    n_art = art_rows.size
    cols = n + n_ub + n_art
    full = np.zeros((m, cols))
    full[:, : n + n_ub] = body
    full[art_rows, n + n_ub + np.arange(n_art)] = 1.0

    basis = np.empty(m, dtype=np.intp)
    basis[slack_ok] = n + np.flatnonzero(slack_ok)
    basis[art_rows] = n + n_ub + np.arange(n_art)

    tab = _Tableau(full, rhs, basis)

    if n_art:
        phase1 = np.zeros(cols)
        phase1[n + n_ub :] = 1.0
        tab.set_objective(phase1)
        allowed = np.ones(cols, dtype=bool)
        status = tab.run(allowed)
        if status != "optimal" or -tab.t[-1, -1] > 1e-7:
            return LPSolution(lower.copy(), np.nan, "infeasible", tab.iterations, "dense")
        _drive_out_artificials(tab, n + n_ub)

    # Phase 2 over structural + slack columns only.
    cost = np.zeros(tab.n)
    cost[:n] = c
    tab.set_objective(cost)
    allowed = np.zeros(tab.n, dtype=bool)
    allowed[: n + n_ub] = True
    status = tab.run(allowed)
    if status != "optimal":
        return LPSolution(lower.copy(), np.nan, status, tab.iterations, "dense")

    y = np.zeros(tab.n)
    y[tab.basis] = tab.t[: tab.m, -1]
    x = y[:n] + shift
    return LPSolution(x, float(c @ x), "optimal", tab.iterations, "dense")


def _drive_out_artificials(tab: _Tableau, n_real: int) -> None:
    """Pivot zero-level artificial variables out of the basis.

    Rows whose artificial cannot be replaced are redundant constraints
    and are dropped from the tableau.
    """
    drop: list[int] = []
    for i in range(tab.m):
        if tab.basis[i] < n_real:
            continue
        row = tab.t[i, :n_real]
        candidates = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        if candidates.size:
            tab.pivot(i, int(candidates[0]))
        else:
            drop.append(i)
    if drop:
        keep = np.setdiff1d(np.arange(tab.m), drop)
        tab.t = np.vstack([tab.t[keep], tab.t[-1:]])
        tab.basis = tab.basis[keep]
        tab.m = keep.size


def assert_optimal(sol: LPSolution, what: str) -> LPSolution:
    if not sol.ok:
        raise SolverFailure(f"{what}: LP finished with status {sol.status!r}")
    return sol
