import numpy as np
import pytest
from scipy.stats import binom

import advgame as ag
from advgame.errors import BadLabel, FileError, KTooLarge, MissingColumn


class TestGame1:
    def test_sawtooth_payoffs(self, game1):
        assert game1.u_undetected[0, 37] == 37.0
        assert game1.u_detected[0, 37] == 210.0
        assert game1.u_undetected[1, 0] == 100.0
        assert game1.u_detected[1, 0] == 300.0

    def test_constant_false_alarm_cost(self, game1):
        assert np.all(game1.false_alarm_cost == 140.0)

    def test_binomial_p0(self, game1):
        assert game1.p0.sum() == pytest.approx(1.0, abs=1e-12)
        assert game1.p0[20] == pytest.approx(binom.pmf(20, 100, 0.2), rel=1e-9)

    def test_zero_gain_vector_gets_denominator_floor(self, game1):
        # r = 0 offers type 1 nothing either way; the detected payoff is
        # floored so the detection formula never divides by zero.
        assert game1.u_detected[0, 0] == 1.0
        assert np.all(game1.denominators >= 1.0)

    def test_validated(self, game1):
        assert game1.validated


class TestGame2:
    def test_fraud_payoffs(self, game2_small):
        a = 100
        assert game2_small.u_undetected[0, a] == 100.0
        assert game2_small.u_detected[0, a] == 0.0
        assert game2_small.false_alarm_cost[a] == pytest.approx(0.03 * a)

    def test_gain_bounds(self, game2_small):
        bounds = ag.gain_bounds(game2_small)
        assert bounds.lower[0] == 0.0
        assert bounds.upper[0] == 999.0

    def test_p0_mean(self, game2_small):
        amounts = np.arange(game2_small.num_vectors)
        assert float(amounts @ game2_small.p0) == pytest.approx(88.0, abs=1e-6)

    def test_default_dimensions(self):
        game = ag.make_game2(ag.Game2Params(ell=0.05))
        assert game.num_vectors == 25692
        amounts = np.arange(game.num_vectors)
        assert float(amounts @ game.p0) == pytest.approx(88.0, abs=1e-6)

    def test_rejects_nonpositive_ell(self):
        with pytest.raises(ValueError):
            ag.make_game2(ag.Game2Params(ell=0.0))


class TestGame3:
    def test_payoff_ranges(self, game3_small):
        assert np.all(game3_small.u_undetected >= 10.0)
        assert np.all(game3_small.u_undetected <= 20.0)
        assert np.all(game3_small.u_detected >= 10.0)
        assert np.all(game3_small.u_detected <= 20.0)
        assert np.all(game3_small.false_alarm_cost >= 10.0)
        assert np.all(game3_small.false_alarm_cost <= 20.0)

    def test_distributions(self, game3_small):
        assert game3_small.p0.sum() == pytest.approx(1.0, abs=1e-12)
        assert game3_small.type_priors.sum() == pytest.approx(1.0, abs=1e-12)
        assert game3_small.p_attack == 0.1

    def test_same_seed_reproduces_identical_game(self):
        a = ag.make_game3(ag.Game3Params(k=5, m=3, seed=11))
        b = ag.make_game3(ag.Game3Params(k=5, m=3, seed=11))
        assert a.u_undetected.tobytes() == b.u_undetected.tobytes()
        assert a.u_detected.tobytes() == b.u_detected.tobytes()
        assert a.false_alarm_cost.tobytes() == b.false_alarm_cost.tobytes()
        assert a.p0.tobytes() == b.p0.tobytes()
        assert a.type_priors.tobytes() == b.type_priors.tobytes()

    def test_k_guard(self):
        with pytest.raises(KTooLarge):
            ag.make_game3(ag.Game3Params(k=25, m=2, seed=0))


class TestIngestFraud:
    def test_toy_file(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("Time,Amount,Class\n1,10.0,0\n2,20.0,1\n")
        game, records = ag.ingest_fraud_csv(path, ell=0.05)
        assert game.p_attack == pytest.approx(0.5)
        assert game.num_vectors == 21
        assert game.p0[10] == 1.0
        assert game.p0.sum() == pytest.approx(1.0)
        assert len(records) == 2
        attacks = [r for r in records if r.is_attack]
        clean = [r for r in records if not r.is_attack]
        assert len(attacks) == 1 and len(clean) == 1
        assert clean[0].c_fa == pytest.approx(0.5)
        assert clean[0].u_undetected[0] == 10.0

    def test_amounts_floored_to_integer_euros(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("Amount,Class\n10.99,0\n10.01,0\n")
        game, records = ag.ingest_fraud_csv(path, ell=0.1)
        assert game.num_vectors == 11
        assert game.p0[10] == 1.0

    def test_missing_column(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("Amount,Label\n10,0\n")
        with pytest.raises(MissingColumn):
            ag.ingest_fraud_csv(path, ell=0.05)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("Amount,Class\n10,7\n")
        with pytest.raises(BadLabel):
            ag.ingest_fraud_csv(path, ell=0.05)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileError):
            ag.ingest_fraud_csv(tmp_path / "nope.csv", ell=0.05)


def test_gallery_games_validate(game1, game2_small, game3_small):
    for game in (game1, game2_small, game3_small):
        assert game.validated
        assert np.all(game.denominators >= game.eps_denom)
