"""Command-line entry point wiring games, solvers, trainers and learners.

Every subcommand writes machine-readable artifacts plus a manifest.json
recording the full configuration, seed and library versions.  Identical
configuration and seed produce byte-identical CSV/JSON artifacts (the
manifest's timestamp is the one exception).

Exit codes: 0 on success (for ``solve``: equilibrium verified), 1 when a
solver or verification fails, 2 for unusable inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .equilibrium import (
    min_gain,
    pi_of_G,
    solve_attacker,
    solve_defender,
    verify_bne,
)
from .errors import AdvgameError, SolverFailure
from .game import DetectionPolicy, gain_bounds, make_profile
from .gallery import (
    Game1Params,
    Game2Params,
    Game3Params,
    ingest_fraud_csv,
    make_game1,
    make_game2,
    make_game3,
)
from .io import dump_json, fmt, load_game, read_csv, save_game, write_csv
from .online import (
    bernoulli_losses,
    distance_to_equilibrium,
    efficient_bound_constants,
    efficient_ogd_run,
    hindsight_step_losses,
    naive_bound_constants,
    naive_ogd_run,
    regret_bound,
    rollout,
    stackelberg_regret,
)
from .training import (
    SampleRecord,
    draw_samples,
    in_argmax,
    saa_solve,
)


def _worker_count(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("ADVGAME_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _write_manifest(out_dir: Path, command: str, args: argparse.Namespace) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in config.items()}
    dump_json(
        {
            "command": command,
            "config": config,
            "seed": getattr(args, "seed", None),
            "versions": {
                "advgame": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "created_unix": int(time.time()),
        },
        out_dir / "manifest.json",
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    game = load_game(args.game)
    out = _out_dir(args)
    solution = solve_defender(game, engine=args.engine)
    attacker = solve_attacker(game, solution, engine=args.engine)
    solution = replace(solution, attacker=attacker)
    report = verify_bne(game, attacker, solution.policy, tol=args.tol)

    lo, hi = gain_bounds(game)
    dump_json(
        {
            "g_max": list(solution.g_max.g),
            "value": solution.value,
            "lower_bounds": list(lo),
            "upper_bounds": list(hi),
        },
        out / "equilibrium.json",
    )
    write_csv(
        out / "policy.csv",
        ["vector_id", "pi"],
        ((v, solution.policy.pi[v]) for v in range(game.num_vectors)),
    )
    write_csv(
        out / "p0.csv",
        ["vector_id", "p0"],
        ((v, game.p0[v]) for v in range(game.num_vectors)),
    )
    alpha = attacker.alpha
    write_csv(
        out / "attacker.csv",
        ["type", "vector_id", "alpha"],
        (
            (i, v, alpha[i, v])
            for i in range(game.num_types)
            for v in np.flatnonzero(alpha[i] > 1e-12)
        ),
    )
    verdict = report.to_dict()
    # The attacker-side program is a feasibility system; other equilibrium
    # strategies may exist besides the one written to attacker.csv.
    verdict["attacker_strategy"] = "one feasible equilibrium strategy"
    dump_json(verdict, out / "verification.json")
    _write_manifest(out, "solve", args)
    if not report.passed:
        print(
            f"equilibrium verification FAILED: gap={report.max_gap:.3e} "
            f"balance={report.max_balance_violation:.3e}",
            file=sys.stderr,
        )
        return 1
    print(f"solved: value={fmt(solution.value)} verified at tol {fmt(args.tol)}")
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

_TRAIN_CTX: dict = {}


def _train_task(job: tuple[int, int]) -> tuple[int, int, np.ndarray, float]:
    n, replica = job
    game = _TRAIN_CTX["game"]
    rng = np.random.default_rng([_TRAIN_CTX["seed"], n, replica])
    samples = draw_samples(game, n, rng)
    report = saa_solve(samples, gain_bounds(game), engine=_TRAIN_CTX["engine"])
    return n, replica, np.asarray(report.g_trained.g), report.empirical_value


def _load_sample_csv(path, num_types: int) -> list[SampleRecord]:
    header, rows = read_csv(path)
    records = []
    for row in rows:
        if int(row["class"]) == 1:
            records.append(SampleRecord.attack(int(row.get("type") or 0)))
        else:
            uu = [float(row[f"uu_{i}"]) for i in range(num_types)]
            ud = [float(row[f"ud_{i}"]) for i in range(num_types)]
            records.append(SampleRecord.non_attack(float(row["c_fa"]), uu, ud))
    return records


def cmd_train(args) -> int:
    game = load_game(args.game)
    out = _out_dir(args)
    bounds = gain_bounds(game)

    if args.samples:
        records = _load_sample_csv(args.samples, game.num_types)
        report = saa_solve(records, bounds, engine=args.engine, seed=args.seed)
        _dump_training(out, report, bounds)
        _write_manifest(out, "train", args)
        print(f"trained on {report.n_samples} file samples: "
              f"value={fmt(report.empirical_value)}")
        return 0

    if args.n is None and args.ns is None:
        raise AdvgameError("train requires --n, --ns or --samples")
    ns = [int(x) for x in args.ns.split(",")] if args.ns else [args.n]
    sweep = args.replicas > 1 or args.ns is not None

    if not sweep:
        rng = np.random.default_rng([args.seed, args.n, 0])
        report = saa_solve(
            draw_samples(game, args.n, rng), bounds, engine=args.engine, seed=args.seed
        )
        _dump_training(out, report, bounds)
        _write_manifest(out, "train", args)
        print(f"trained: n={args.n} value={fmt(report.empirical_value)}")
        return 0

    solution = solve_defender(game, engine=args.engine)
    _TRAIN_CTX.update(game=game, seed=args.seed, engine=args.engine)
    jobs = [(n, r) for n in ns for r in range(args.replicas)]
    workers = min(_worker_count(args.workers), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_train_task, jobs))
    else:
        results = [_train_task(job) for job in jobs]
    results.sort(key=lambda row: (row[0], row[1]))

    rows = []
    for n, replica, g, empirical in results:
        trained_value = min_gain(game, make_profile(game, g))
        member = in_argmax(game, g, solution)
        ratio = 100.0 * solution.value / trained_value if trained_value != 0 else None
        rows.append(
            (
                n,
                replica,
                float("nan") if ratio is None else ratio,
                int(member),
                empirical,
                trained_value,
                solution.value - trained_value,
            )
        )
    write_csv(
        out / "saa_sweep.csv",
        ["n", "replica", "ratio", "in_argmax", "empirical_value", "trained_value", "value_gap"],
        rows,
    )
    _write_manifest(out, "train", args)
    print(f"sweep complete: {len(rows)} rows -> {out / 'saa_sweep.csv'}")
    return 0


def _dump_training(out: Path, report, bounds) -> None:
    dump_json(
        {
            "g_trained": list(report.g_trained.g),
            "empirical_value": report.empirical_value,
            "n_samples": report.n_samples,
            "seed": report.seed,
            "lower_bounds": list(bounds.lower),
            "upper_bounds": list(bounds.upper),
        },
        out / "training.json",
    )


# ---------------------------------------------------------------------------
# online
# ---------------------------------------------------------------------------

_ONLINE_CTX: dict = {}


def _initial_profile(game, mode: str, rng: np.random.Generator) -> np.ndarray:
    lo, hi = gain_bounds(game)
    if mode == "lower":
        return lo.copy()
    if mode == "upper":
        return hi.copy()
    if mode == "mid":
        return (lo + hi) / 2.0
    if mode == "corner":
        g = lo.copy()
        g[1::2] = hi[1::2]
        return g
    if mode == "random":
        return rng.uniform(lo, hi)
    raise AdvgameError(f"unknown g-init mode {mode!r}")


def _online_task(replica: int):
    ctx = _ONLINE_CTX
    game = ctx["game"]
    rng = np.random.default_rng([ctx["seed"], replica])
    if ctx["algo"] == "efficient":
        g0 = _initial_profile(game, ctx["g_init"], rng)
        trace = efficient_ogd_run(
            game, ctx["steps"], make_profile(game, g0), rng,
            step_scale=ctx["step_scale"],
        )
    else:
        trace = naive_ogd_run(game, ctx["steps"], rng, step_scale=ctx["step_scale"])
    result = stackelberg_regret(trace, game, engine=ctx["engine"])
    return replica, trace, result


def cmd_online(args) -> int:
    game = load_game(args.game)
    out = _out_dir(args)
    m = game.num_types

    _ONLINE_CTX.update(
        game=game,
        steps=args.steps,
        algo=args.algo,
        g_init=args.g_init,
        seed=args.seed,
        engine=args.engine,
        step_scale=args.step_scale,
    )
    replicas = list(range(args.replicas))
    workers = min(_worker_count(args.workers), len(replicas))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_online_task, replicas))
    else:
        outputs = [_online_task(r) for r in replicas]
    outputs.sort(key=lambda item: item[0])

    solution = None
    if args.algo == "efficient" and not args.no_distance:
        solution = solve_defender(game, engine=args.engine)

    bound = (
        efficient_bound_constants(game, args.steps)
        if args.algo == "efficient"
        else naive_bound_constants(game, args.steps)
    )
    bound_value = regret_bound(bound)

    summary = []
    for replica, trace, result in outputs:
        star_realized, star_surrogate = hindsight_step_losses(trace, game, result.g_star)
        cum_realized = np.cumsum(trace.realized_loss - star_realized)
        cum_surrogate = np.cumsum(trace.surrogate_loss - star_surrogate)
        header = [
            "step", "event_kind", "type", "vector_id", "realized_loss",
            "surrogate_loss", "cum_realized_regret", "cum_surrogate_regret",
        ] + [f"g_{i + 1}" for i in range(m)]
        columns = [
            np.arange(1, trace.horizon + 1),
            trace.event_kind,
            trace.type_index,
            trace.vector_id,
            trace.realized_loss,
            trace.surrogate_loss,
            cum_realized,
            cum_surrogate,
        ] + [trace.g[:, i] for i in range(m)]
        if args.sample_losses:
            header.append("sampled_loss")
            columns.append(
                bernoulli_losses(trace, game, np.random.default_rng([args.seed, replica, 1]))
            )
        write_csv(out / f"regret_trace_r{replica}.csv", header, zip(*columns))
        if solution is not None:
            distances = distance_to_equilibrium(trace, solution.g_max)
            write_csv(
                out / f"distance_r{replica}.csv",
                ["step", "l2_to_gmax"],
                zip(np.arange(1, trace.horizon + 1), distances),
            )
        summary.append(
            (
                replica,
                result.realized_regret,
                result.surrogate_regret,
                result.comparator,
                bound.d,
                bound.l_const,
                bound_value,
            )
        )
    write_csv(
        out / "summary.csv",
        ["replica", "realized_regret", "surrogate_regret", "comparator",
         "bound_d", "bound_l", "bound_value"],
        summary,
    )
    _write_manifest(out, "online", args)
    mean_reg = float(np.mean([row[2] for row in summary]))
    print(
        f"online {args.algo}: {args.replicas} replicas, mean surrogate regret "
        f"{fmt(mean_reg)} (bound {fmt(bound_value)})"
    )
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    game = load_game(args.game)
    out = _out_dir(args)
    if args.policy:
        _, rows = read_csv(args.policy)
        pi = np.zeros(game.num_vectors)
        for row in rows:
            pi[int(row["vector_id"])] = float(row["pi"])
        policy = DetectionPolicy(pi)
    elif args.profile:
        g = np.array([float(x) for x in args.profile.split(",")])
        policy = pi_of_G(game, make_profile(game, g))
    else:
        raise AdvgameError("simulate requires --policy or --profile")
    trace = rollout(game, policy, args.steps, np.random.default_rng([args.seed]))
    write_csv(
        out / "events.csv",
        ["step", "event_kind", "type", "vector_id", "loss"],
        zip(
            np.arange(1, args.steps + 1),
            trace.event_kind,
            trace.type_index,
            trace.vector_id,
            trace.realized_loss,
        ),
    )
    _write_manifest(out, "simulate", args)
    print(f"simulated {args.steps} steps -> {out / 'events.csv'}")
    return 0


# ---------------------------------------------------------------------------
# gallery / ingest
# ---------------------------------------------------------------------------


def cmd_gallery(args) -> int:
    if args.name == "game1":
        priors = tuple(float(x) for x in args.priors.split(","))
        game = make_game1(
            Game1Params(
                theta0=args.theta0,
                p_attack=args.p_attack if args.p_attack is not None else 0.2,
                priors=priors,
                cfa_const=args.cfa_const,
            )
        )
    elif args.name == "game2":
        game = make_game2(
            Game2Params(
                ell=args.ell,
                max_amount=args.max_amount,
                mean_amount=args.mean_amount,
                p_attack=args.p_attack if args.p_attack is not None else 0.00172,
            )
        )
    elif args.name == "game3":
        game = make_game3(
            Game3Params(
                k=args.k,
                m=args.m,
                p_attack=args.p_attack if args.p_attack is not None else 0.1,
                seed=args.seed,
            )
        )
    else:
        raise AdvgameError(f"unknown gallery game {args.name!r}")
    save_game(game, args.out)
    print(f"wrote {args.name} ({game.num_vectors} vectors, {game.num_types} types) -> {args.out}")
    return 0


def cmd_ingest_fraud(args) -> int:
    out = _out_dir(args)
    game, records = ingest_fraud_csv(args.csv, args.ell)
    save_game(game, out / "game.json")
    m = game.num_types
    header = ["class", "type", "c_fa"] + [
        col for i in range(m) for col in (f"uu_{i}", f"ud_{i}")
    ]

    def rows():
        for rec in records:
            if rec.is_attack:
                yield [1, rec.type_index, 0.0] + [0.0] * (2 * m)
            else:
                payoff_cols = [
                    x for i in range(m) for x in (rec.u_undetected[i], rec.u_detected[i])
                ]
                yield [0, "", rec.c_fa] + payoff_cols

    write_csv(out / "samples.csv", header, rows())
    _write_manifest(out, "ingest-fraud", args)
    print(
        f"ingested {len(records)} rows: p_attack={fmt(game.p_attack)}, "
        f"{game.num_vectors} amounts -> {out}"
    )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advgame",
        description="Bayesian adversarial-classification games: solve, train, learn online.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--engine", default="auto", choices=["auto", "dense", "highs"])
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: ADVGAME_THREADS or cores)")

    p = sub.add_parser("solve", help="compute and verify an exact equilibrium")
    p.add_argument("--game", required=True)
    p.add_argument("--tol", type=float, default=1e-6, help="verification tolerance")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="sample-average training of the gain profile")
    p.add_argument("--game", required=True)
    p.add_argument("--n", type=int, default=None, help="samples per training run")
    p.add_argument("--ns", default=None, help="comma list of sample sizes (sweep mode)")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--samples", default=None, help="train on a samples.csv instead of drawing")
    common(p, seed_default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("online", help="online learning against best responders")
    p.add_argument("--game", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--algo", default="efficient", choices=["efficient", "naive"])
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--g-init", default="mid",
                   choices=["lower", "upper", "mid", "corner", "random"])
    p.add_argument("--step-scale", type=float, default=1.0,
                   help="scales the 1/sqrt(t) step size (exploration only)")
    p.add_argument("--sample-losses", action="store_true",
                   help="add a Bernoulli-sampled loss column")
    p.add_argument("--no-distance", action="store_true",
                   help="skip the distance-to-equilibrium files (no exact solve)")
    common(p)
    p.set_defaults(func=cmd_online)

    p = sub.add_parser("simulate", help="environment rollout under a fixed policy")
    p.add_argument("--game", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--policy", default=None, help="policy.csv path")
    p.add_argument("--profile", default=None, help="comma list of gain caps")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gallery", help="emit a benchmark game file")
    p.add_argument("--name", required=True, choices=["game1", "game2", "game3"])
    p.add_argument("--out", required=True, help="output game JSON path")
    p.add_argument("--p-attack", type=float, default=None)
    p.add_argument("--theta0", type=float, default=0.2)
    p.add_argument("--priors", default="0.5,0.5")
    p.add_argument("--cfa-const", type=float, default=140.0)
    p.add_argument("--ell", type=float, default=0.05)
    p.add_argument("--max-amount", type=int, default=25691)
    p.add_argument("--mean-amount", type=float, default=88.0)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("ingest-fraud", help="build a game and samples from a fraud CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--ell", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_ingest_fraud)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    except (AdvgameError, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
