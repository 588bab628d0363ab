import numpy as np
import pytest

import advgame as ag
from advgame.errors import GameValidationError
from advgame.io import dump_json, fmt, load_json, read_csv, write_csv

from helpers import random_game


def test_fmt_significant_digits():
    assert fmt(0.1) == "0.1"
    assert fmt(1.0) == "1"
    assert fmt(1e-60) == "1e-60"
    assert fmt(123456789.123456789) == "123456789.123"
    assert fmt(7) == "7"


def test_game_round_trip(tmp_path, rng):
    game = random_game(rng, n_vectors=17)
    path = tmp_path / "game.json"
    ag.save_game(game, path)
    loaded = ag.load_game(path)
    assert loaded.num_vectors == game.num_vectors
    assert loaded.num_types == game.num_types
    assert loaded.p_attack == pytest.approx(game.p_attack, rel=1e-11)
    np.testing.assert_allclose(loaded.u_undetected, game.u_undetected, rtol=1e-11)
    np.testing.assert_allclose(loaded.p0, game.p0, rtol=1e-9, atol=1e-15)
    assert loaded.validated


def test_game1_round_trip_preserves_features(tmp_path, game1):
    path = tmp_path / "game1.json"
    ag.save_game(game1, path)
    loaded = ag.load_game(path)
    assert loaded.features is not None
    assert loaded.features[37] == (37,)


def test_non_contiguous_ids_rejected(tmp_path, rng):
    game = random_game(rng, n_vectors=4)
    path = tmp_path / "game.json"
    ag.save_game(game, path)
    doc = load_json(path)
    doc["vectors"][1]["id"] = 9
    dump_json(doc, path)
    with pytest.raises(GameValidationError):
        ag.load_game(path)


def test_save_is_deterministic(tmp_path, rng):
    game = random_game(rng, n_vectors=9)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    ag.save_game(game, a)
    ag.save_game(game, b)
    assert a.read_bytes() == b.read_bytes()


def test_write_csv_formatting(tmp_path):
    path = tmp_path / "rows.csv"
    write_csv(path, ["id", "x"], [(1, 0.5), (2, 1e-12)])
    assert path.read_text() == "id,x\n1,0.5\n2,1e-12\n"
    header, rows = read_csv(path)
    assert header == ["id", "x"]
    assert rows[1]["x"] == "1e-12"
