"""File formats: the game JSON document and the CSV artifacts.

A game file is a single JSON object:

    {"p_attack": 0.2,
     "type_priors": [0.5, 0.5],
     "eps_denom": 1e-9,            # optional
     "name": "game1",              # optional
     "vectors": [{"id": 0, "features": [0], "p0": 0.1, "c_fa": 140.0,
                  "u_undetected": [0.0, 100.0], "u_detected": [1.0, 300.0]},
                 ...]}

Vector ids must be exactly 0..|V|-1; entries may appear in any order and
are sorted by id on load.  All floats are serialized with 12 significant
digits, in files and CSVs alike, so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import FileError, GameValidationError
from .game import GameSpec, validate_game


def fmt(x) -> str:
    """Canonical 12-significant-digit rendering used in every artifact."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def game_to_dict(game: GameSpec) -> dict:
    vectors = []
    for v in range(game.num_vectors):
        entry = {
            "id": v,
            "p0": float(game.p0[v]),
            "c_fa": float(game.false_alarm_cost[v]),
            "u_undetected": [float(x) for x in game.u_undetected[:, v]],
            "u_detected": [float(x) for x in game.u_detected[:, v]],
        }
        if game.features is not None:
            entry["features"] = list(game.features[v])
        vectors.append(entry)
    out = {
        "p_attack": float(game.p_attack),
        "type_priors": [float(x) for x in game.type_priors],
        "vectors": vectors,
    }
    if game.eps_denom != 1e-9:
        out["eps_denom"] = game.eps_denom
    if game.name:
        out["name"] = game.name
    return out


def game_from_dict(doc: dict) -> GameSpec:
    try:
        vectors = doc["vectors"]
        p_attack = doc["p_attack"]
        priors = np.asarray(doc["type_priors"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise GameValidationError(f"game document lacks field {exc}") from exc
    if not vectors:
        raise GameValidationError("game document has no vectors")

    ids = sorted(int(v["id"]) for v in vectors)
    n = len(vectors)
    if ids != list(range(n)):
        raise GameValidationError("vector ids must be contiguous 0..|V|-1")

    m = priors.shape[0]
    uu = np.zeros((m, n))
    ud = np.zeros((m, n))
    cfa = np.zeros(n)
    p0 = np.zeros(n)
    features: list[tuple[float, ...]] | None = None
    for entry in vectors:
        v = int(entry["id"])
        uu[:, v] = entry["u_undetected"]
        ud[:, v] = entry["u_detected"]
        cfa[v] = entry["c_fa"]
        p0[v] = entry["p0"]
        if "features" in entry:
            if features is None:
                features = [()] * n
            features[v] = tuple(entry["features"])

    return validate_game(
        GameSpec(
            p_attack=float(p_attack),
            type_priors=priors,
            u_undetected=uu,
            u_detected=ud,
            false_alarm_cost=cfa,
            p0=p0,
            features=tuple(features) if features is not None else None,
            eps_denom=float(doc.get("eps_denom", 1e-9)),
            name=str(doc.get("name", "")),
        )
    )


def _encode(obj):
    if isinstance(obj, float):
        yield fmt(obj)
    elif isinstance(obj, bool):
        yield "true" if obj else "false"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, np.floating):
        yield fmt(float(obj))
    elif obj is None:
        yield "null"
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, dict):
        yield "{"
        for i, (key, value) in enumerate(obj.items()):
            if i:
                yield ", "
            yield json.dumps(str(key))
            yield ": "
            yield from _encode(value)
        yield "}"
    elif isinstance(obj, (list, tuple, np.ndarray)):
        yield "["
        for i, value in enumerate(obj):
            if i:
                yield ", "
            yield from _encode(value)
        yield "]"
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dump_json(doc, path) -> None:
    text = "".join(_encode(doc))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc


def save_game(game: GameSpec, path) -> None:
    dump_json(game_to_dict(game), path)


def load_game(path) -> GameSpec:
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise GameValidationError("game file must contain a JSON object")
    return game_from_dict(doc)


def write_csv(path, header: list[str], rows) -> None:
    """Write rows of mixed ints/floats through the canonical formatter."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([x if isinstance(x, str) else fmt(x) for x in row])


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            return list(reader.fieldnames or []), list(reader)
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
