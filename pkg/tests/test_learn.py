"""Tests for HMM mixture parameters, likelihoods, gradients and training."""

import itertools
from itertools import count

import numpy as np
import pytest
from pydantic import ValidationError

from tnprob.data.bars_and_stripes import build_dataset
from tnprob.errors import (
    EmptyDatasetError,
    OutcomeRangeError,
    ShapeMismatchError,
    TrainingDivergedError,
    ZeroProbabilitySequenceError,
)
from tnprob.inference import distribution
from tnprob.learn import (
    ChainTables,
    HmmMixtureParams,
    TrainConfig,
    build_hmm_bm,
    build_hmm_ugm,
    init_params,
    mixture_log_prob,
    mixture_prob,
    nll,
    nll_and_grad,
    nll_grad,
    param_count,
    run_replication,
    train,
)
from tnprob.models import MixtureFamily
from tnprob.verify.oracles import brute_force_mixture_prob

FAMILIES = [MixtureFamily.UGM, MixtureFamily.DBM]


def all_sequences(d_obs: int, t_len: int) -> np.ndarray:
    return np.array(list(itertools.product(range(d_obs), repeat=t_len)))


def fake_clock():
    ticks = count()
    return lambda: float(next(ticks))


class TestParams:
    def test_param_count_matches_for_both_families(self):
        assert param_count((4, 2)) == 57
        for family in FAMILIES:
            p = init_params(family, 4, 2, 16, seed=0)
            assert param_count(p) == 57
            assert p.to_vector().shape == (57,)

    def test_vector_round_trip(self):
        p = init_params("dbm", 3, 2, 5, seed=1)
        back = p.from_vector(p.to_vector())
        np.testing.assert_array_equal(back.to_vector(), p.to_vector())
        assert back.family is MixtureFamily.DBM
        assert back.t_len == 5

    def test_vector_length_checked(self):
        p = init_params("ugm", 2, 2, 3, seed=0)
        with pytest.raises(ShapeMismatchError):
            p.from_vector(np.zeros(3))

    def test_dbm_phases_lie_in_one_turn(self):
        p = init_params("dbm", 4, 2, 8, seed=3)
        for table in p.second.arrays():
            assert table.min() >= 0.0
            assert table.max() < 1.0

    def test_same_seed_same_parameters(self):
        a, b = init_params("ugm", 3, 2, 4, seed=9), init_params("ugm", 3, 2, 4, seed=9)
        np.testing.assert_array_equal(a.to_vector(), b.to_vector())

    def test_mixture_weight_is_sigmoid(self):
        p = init_params("ugm", 2, 2, 3, seed=0)
        assert p.from_vector(np.append(p.to_vector()[:-1], 0.0)).mixture_weight == 0.5

    def test_inconsistent_tables(self):
        with pytest.raises(ShapeMismatchError):
            ChainTables(np.zeros((2, 2)), np.zeros((3, 2)), np.zeros(2))

    def test_train_config_bounds(self):
        with pytest.raises(ValidationError):
            TrainConfig(epochs=0)
        with pytest.raises(ValidationError):
            TrainConfig(split_fraction=1.0)

    def test_split_seed_ignores_hidden_dimension(self):
        cfg = TrainConfig(seed=5)
        assert cfg.split_seed(2) == TrainConfig(seed=5, epochs=3).split_seed(2)
        assert cfg.split_seed(2) != cfg.init_seed(2)
        assert cfg.split_seed(1) != cfg.split_seed(2)


class TestLikelihood:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_matches_brute_force(self, family):
        p = init_params(family, 2, 2, 3, seed=11)
        for obs in all_sequences(2, 3):
            assert mixture_prob(p, obs) == pytest.approx(brute_force_mixture_prob(p, obs), rel=1e-10)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_normalized_over_all_sequences(self, family):
        p = init_params(family, 3, 2, 4, seed=4)
        total = np.exp(mixture_log_prob(p, all_sequences(2, 4))).sum()
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_dbm_components_match_network_inference(self):
        p = init_params("dbm", 2, 2, 3, seed=2)
        ugm = distribution(build_hmm_ugm(p))
        bm = distribution(build_hmm_bm(p))
        w = p.mixture_weight
        for obs in all_sequences(2, 3):
            expected = w * ugm.probability(obs) + (1 - w) * bm.probability(obs)
            assert mixture_prob(p, obs) == pytest.approx(expected, rel=1e-10)

    def test_ugm_components_match_network_inference(self):
        p = init_params("ugm", 2, 2, 3, seed=6)
        first = distribution(build_hmm_ugm(p, component=1))
        second = distribution(build_hmm_ugm(p, component=2))
        w = p.mixture_weight
        for obs in all_sequences(2, 3):
            expected = w * first.probability(obs) + (1 - w) * second.probability(obs)
            assert mixture_prob(p, obs) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("logit", [-3.0, 0.0, 3.0])
    def test_zero_phase_single_state_collapses(self, logit):
        p = init_params("dbm", 1, 2, 4, seed=8)
        vector = p.to_vector()
        half = (vector.size - 1) // 2
        vector[half:-1] = 0.0
        vector[-1] = logit
        p = p.from_vector(vector)
        hmm = distribution(build_hmm_ugm(p))
        for obs in all_sequences(2, 4):
            assert mixture_prob(p, obs) == pytest.approx(hmm.probability(obs), rel=1e-12)

    def test_nll_is_mean_negative_log_prob(self):
        p = init_params("ugm", 2, 2, 3, seed=0)
        sequences = all_sequences(2, 3)[:5]
        assert nll(p, sequences) == pytest.approx(-mixture_log_prob(p, sequences).mean())

    def test_observation_checks(self):
        p = init_params("ugm", 2, 2, 3, seed=0)
        with pytest.raises(ShapeMismatchError):
            nll(p, [[0, 1]])
        with pytest.raises(OutcomeRangeError):
            nll(p, [[0, 1, 2]])
        with pytest.raises(EmptyDatasetError):
            nll(p, np.zeros((0, 3), dtype=int))

    def test_zero_probability_sequence(self):
        forbid = ChainTables(np.zeros((1, 1)), np.array([[0.0, -np.inf]]), np.zeros(1))
        p = HmmMixtureParams("ugm", forbid, forbid, 0.0, 2)
        with pytest.raises(ZeroProbabilitySequenceError) as info:
            nll(p, [[0, 0], [1, 1]])
        assert info.value.index == 1


class TestGradient:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_matches_central_differences(self, family):
        p = init_params(family, 2, 2, 3, seed=21)
        sequences = all_sequences(2, 3)[[0, 2, 5, 7]]
        analytic = nll_grad(p, sequences).to_vector()
        vector = p.to_vector()
        step = 1e-5
        numeric = np.zeros_like(vector)
        for i in range(vector.size):
            up, down = vector.copy(), vector.copy()
            up[i] += step
            down[i] -= step
            numeric[i] = (nll(p.from_vector(up), sequences) - nll(p.from_vector(down), sequences)) / (2 * step)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-7)

    def test_loss_agrees_with_nll(self):
        p = init_params("dbm", 2, 2, 3, seed=1)
        sequences = all_sequences(2, 3)
        loss, grad = nll_and_grad(p, sequences)
        assert loss == pytest.approx(nll(p, sequences))
        assert grad.family is MixtureFamily.DBM

    @pytest.mark.parametrize("family", FAMILIES)
    def test_single_step_sequences(self, family):
        p = init_params(family, 2, 2, 1, seed=0)
        grad = nll_grad(p, [[0], [1]])
        np.testing.assert_array_equal(grad.first.transition, np.zeros((2, 2)))
        np.testing.assert_array_equal(grad.second.transition, np.zeros((2, 2)))
        assert np.all(np.isfinite(grad.to_vector()))
        assert np.abs(grad.first.emission).max() > 0.0

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("seed", range(3))
    def test_long_sequences_stay_finite(self, family, seed):
        p = init_params(family, 4, 2, 256, seed=seed)
        sequences = np.random.default_rng(seed).integers(0, 2, size=(3, 256))
        loss, grad = nll_and_grad(p, sequences)
        assert np.isfinite(loss) and loss > 0.0
        assert loss == pytest.approx(nll(p, sequences))
        assert np.all(np.isfinite(grad.to_vector()))


class TestTraining:
    @pytest.fixture
    def data(self):
        obs = build_dataset(2, 2, segment_len=None).as_indices()
        return obs[:4], obs[4:]

    def test_zero_steps_records_initial_point(self, data):
        p0 = init_params("ugm", 2, 2, 4, seed=0)
        result = train(p0, *data, TrainConfig(), steps=0)
        assert len(result.trajectory) == 1
        assert result.best_epoch == 0
        assert result.trajectory[0].train_nll == pytest.approx(nll(p0, data[0]))
        np.testing.assert_array_equal(result.best_params.to_vector(), p0.to_vector())

    @pytest.mark.parametrize("family", FAMILIES)
    def test_training_lowers_train_nll(self, family, data):
        p0 = init_params(family, 2, 2, 4, seed=0)
        result = train(p0, *data, TrainConfig(lr=0.05), steps=25, clock=fake_clock())
        assert len(result.trajectory) == 26
        assert result.trajectory[-1].train_nll < result.trajectory[0].train_nll
        assert [r.epoch for r in result.trajectory] == list(range(26))

    def test_best_epoch_has_minimum_test_nll(self, data):
        p0 = init_params("dbm", 2, 2, 4, seed=1)
        result = train(p0, *data, TrainConfig(lr=0.05), steps=10)
        tests = [r.test_nll for r in result.trajectory]
        assert result.best_epoch == int(np.argmin(tests))
        assert nll(result.best_params, data[1]) == pytest.approx(result.best_test_nll, rel=1e-10)

    def test_wall_clock_from_injected_clock(self, data):
        p0 = init_params("ugm", 2, 2, 4, seed=0)
        result = train(p0, *data, TrainConfig(), steps=2, clock=fake_clock())
        assert [r.wall_seconds for r in result.trajectory] == [1.0, 2.0, 3.0]

    def test_divergence_raises_with_trajectory(self):
        forbid = ChainTables(np.zeros((1, 1)), np.array([[0.0, -np.inf]]), np.zeros(1))
        p0 = HmmMixtureParams("ugm", forbid, forbid, 0.0, 2)
        with pytest.raises(TrainingDivergedError) as info:
            train(p0, [[1, 1]], [[0, 0]], TrainConfig(), steps=1)
        assert info.value.trajectory == []

    def test_replication_is_reproducible(self):
        dataset = build_dataset(2, 2, segment_len=None)
        cfg = TrainConfig(epochs=3, seed=4)
        first = run_replication("dbm", 2, dataset, cfg, 1)
        second = run_replication("dbm", 2, dataset, cfg, 1)
        assert first.ok
        assert first.split_seed == cfg.split_seed(1)
        assert [r.train_nll for r in first.trajectory] == [r.train_nll for r in second.trajectory]
        assert [r.test_nll for r in first.trajectory] == [r.test_nll for r in second.trajectory]
