"""Constructors for the benchmark games and the fraud-dataset ingester.

Three artificial families are provided:

* game 1 -- two attacker types over 101 vectors with mirrored sawtooth
  payoffs, a constant false-alarm cost and a binomial non-attack
  distribution; small enough to cross-check against grid oracles.
* game 2 -- a bank-fraud model where a vector is a transaction amount in
  whole euros, the attacker gains the amount when undetected and the
  defender pays a fraction ``ell`` of the amount per false alarm.
* game 3 -- a fully random game on k binary features: every payoff is
  drawn uniformly from [10, 20], priors are random, and the non-attack
  distribution is uniform on the simplex; the worst case for learning
  since nothing correlates with anything.

Zero-gain vectors (amount 0, or the r = 0 vector of game 1's first
type) would make the undetected + detected payoff sum vanish, which the
detection formula divides by.  Those cells get a detected-payoff floor
of 1: the affected vector offers the attacker nothing and is never
detected on that type's account, so equilibria are unchanged.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from scipy.special import gammaln

from .errors import BadLabel, FileError, KTooLarge, MissingColumn, MissingFeature
from .game import GameSpec, validate_game
from .training import SampleRecord

DENOMINATOR_FLOOR = 1.0


def _binomial_pmf(n: int, p: float) -> np.ndarray:
    """Binomial(n, p) mass function computed in log space for stability."""
    k = np.arange(n + 1)
    if p <= 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if p >= 1.0:
        out = np.zeros(n + 1)
        out[-1] = 1.0
        return out
    log_pmf = (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    pmf = np.exp(log_pmf)
    return pmf / pmf.sum()


def _floor_denominators(uu: np.ndarray, ud: np.ndarray) -> np.ndarray:
    """Raise detected payoffs where uu + ud would vanish."""
    ud = ud.copy()
    short = (uu + ud) < DENOMINATOR_FLOOR
    ud[short] = DENOMINATOR_FLOOR - uu[short]
    return ud


@dataclass(frozen=True)
class Game1Params:
    theta0: float = 0.2
    p_attack: float = 0.2
    priors: tuple[float, float] = (0.5, 0.5)
    cfa_const: float = 140.0


def make_game1(params: Game1Params = Game1Params()) -> GameSpec:
    if not 0.0 < params.theta0 < 1.0:
        raise ValueError("theta0 must lie in (0, 1)")
    r = np.arange(101)
    uu = np.stack([r.astype(float), 100.0 - r])
    ud = np.stack([30.0 * (r % 10), 300.0 - 30.0 * (r % 10)])
    return validate_game(
        GameSpec(
            p_attack=params.p_attack,
            type_priors=np.asarray(params.priors, dtype=float),
            u_undetected=uu,
            u_detected=_floor_denominators(uu, ud),
            false_alarm_cost=np.full(101, float(params.cfa_const)),
            p0=_binomial_pmf(100, params.theta0),
            features=tuple((int(i),) for i in r),
            name="game1",
        )
    )


@dataclass(frozen=True)
class Game2Params:
    ell: float = 0.05
    max_amount: int = 25691
    mean_amount: float = 88.0
    p_attack: float = 0.00172


def make_game2(params: Game2Params = Game2Params()) -> GameSpec:
    if params.ell <= 0.0:
        raise ValueError("ell must be positive")
    amounts = np.arange(params.max_amount + 1, dtype=float)
    uu = amounts[None, :]
    ud = _floor_denominators(uu, np.zeros_like(uu))
    return validate_game(
        GameSpec(
            p_attack=params.p_attack,
            type_priors=np.array([1.0]),
            u_undetected=uu,
            u_detected=ud,
            false_alarm_cost=params.ell * amounts,
            p0=_binomial_pmf(params.max_amount, params.mean_amount / params.max_amount),
            name=f"game2-ell{params.ell:g}",
        )
    )


@dataclass(frozen=True)
class Game3Params:
    k: int = 10
    m: int = 4
    p_attack: float = 0.1
    seed: int = 0


MAX_GAME3_FEATURES = 24


def make_game3(params: Game3Params) -> GameSpec:
    """Random game on 2**k vectors; fully determined by the seed.

    Draw order is fixed (priors, undetected, detected, false alarms,
    non-attack weights) so the same seed always yields the same game.
    Feature tuples are not materialized: vector id ``v`` stands for the
    k-bit pattern of ``v``.
    """
    if params.k < 1 or params.k > MAX_GAME3_FEATURES:
        raise KTooLarge(f"k={params.k} outside [1, {MAX_GAME3_FEATURES}]")
    if params.m < 1:
        raise ValueError("m must be at least 1")
    n = 2**params.k
    rng = np.random.default_rng(params.seed)
    priors = rng.uniform(0.0, 1.0, params.m)
    priors /= priors.sum()
    uu = rng.uniform(10.0, 20.0, (params.m, n))
    ud = rng.uniform(10.0, 20.0, (params.m, n))
    cfa = rng.uniform(10.0, 20.0, n)
    # Uniform on the simplex via exponential normalization.
    mass = rng.exponential(1.0, n)
    return validate_game(
        GameSpec(
            p_attack=params.p_attack,
            type_priors=priors,
            u_undetected=uu,
            u_detected=ud,
            false_alarm_cost=cfa,
            p0=mass / mass.sum(),
            name=f"game3-k{params.k}-m{params.m}-s{params.seed}",
        )
    )


class FraudPayoffs:
    """Payoff model for amount-only fraud rows: gain the amount when
    undetected, nothing when detected, false alarms cost ell * amount."""

    def __init__(self, ell: float, num_types: int = 1):
        if ell <= 0.0:
            raise ValueError("ell must be positive")
        self.ell = float(ell)
        self.num_types = int(num_types)

    def evaluate(self, row) -> tuple[float, np.ndarray, np.ndarray]:
        try:
            amount = float(row["Amount"])
        except (KeyError, TypeError):
            raise MissingFeature("row lacks an Amount feature") from None
        a = float(math.floor(amount))
        uu = np.full(self.num_types, a)
        ud = np.zeros(self.num_types) if a >= DENOMINATOR_FLOOR else np.full(
            self.num_types, DENOMINATOR_FLOOR - a
        )
        return self.ell * a, uu, ud


def ingest_fraud_csv(path, ell: float) -> tuple[GameSpec, list[SampleRecord]]:
    """Build a game and a sample list from a fraud-transactions CSV.

    Requires at least ``Amount`` and ``Class`` columns (the Kaggle credit
    card layout also carries Time and V1..V28, which are ignored).
    Amounts are floored to whole euros and become vector ids; the
    empirical distribution of class-0 amounts becomes the non-attack
    distribution and the attack fraction becomes p_attack.
    """
    payoffs = FraudPayoffs(ell)
    records: list[SampleRecord] = []
    amount_counts: dict[int, int] = {}
    n_attack = 0
    n_total = 0
    max_amount = 0
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for col in ("Amount", "Class"):
            if col not in header:
                raise MissingColumn(f"CSV lacks required column {col!r}")
        for row in reader:
            label = _parse_label(row["Class"])
            amount = int(math.floor(float(row["Amount"])))
            max_amount = max(max_amount, amount)
            n_total += 1
            if label == 1:
                n_attack += 1
                records.append(SampleRecord.attack(0))
            else:
                amount_counts[amount] = amount_counts.get(amount, 0) + 1
                cfa, uu, ud = payoffs.evaluate(row)
                records.append(SampleRecord.non_attack(cfa, uu, ud))
    if n_total == 0:
        raise FileError(f"{path} contains no data rows")
    n_clean = n_total - n_attack
    if n_clean == 0:
        raise BadLabel("every row is an attack; no non-attack distribution")

    amounts = np.arange(max_amount + 1, dtype=float)
    p0 = np.zeros(max_amount + 1)
    for amount, count in amount_counts.items():
        p0[amount] = count / n_clean
    uu = amounts[None, :]
    game = validate_game(
        GameSpec(
            p_attack=n_attack / n_total,
            type_priors=np.array([1.0]),
            u_undetected=uu,
            u_detected=_floor_denominators(uu, np.zeros_like(uu)),
            false_alarm_cost=float(ell) * amounts,
            p0=p0,
            name="fraud",
        )
    )
    return game, records


def _parse_label(raw) -> int:
    try:
        label = int(str(raw).strip().strip('"'))
    except ValueError:
        raise BadLabel(f"class label {raw!r} is not an integer") from None
    if label not in (0, 1):
        raise BadLabel(f"class label {label} is not 0 or 1")
    return label
