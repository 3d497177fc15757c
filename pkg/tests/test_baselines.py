import numpy as np
import pytest
from conftest import answers, build_graph

from xorcrowd.baselines import em_one_coin, majority_vote, one_coin_log_likelihood
from xorcrowd.model import DegreeDistribution, LabelVector
from xorcrowd.noise import DEGREE_INDEPENDENT, NoiseSpec, answer_queries, build_reliability
from xorcrowd.querygen import QueryGenConfig, generate_queries


def rng(seed=0):
    return np.random.default_rng(seed)


def repetition_instance(m, per_label, w, eps_k, seed):
    """Degree-1 graph asking each label ``per_label`` times, workers cycling."""
    items = []
    k = 0
    for i in range(m):
        for _ in range(per_label):
            items.append(((i,), k % w))
            k += 1
    graph = build_graph(m, w, items)
    truth = LabelVector.random(m, rng(seed))
    spec = NoiseSpec.unchecked(DEGREE_INDEPENDENT, eps_k=tuple(eps_k))
    rel = build_reliability(spec, w=w, D=1)
    y = answer_queries(truth, graph, rel, rng(seed + 1))
    return graph, truth, y


class TestMajorityVote:
    def test_hand_example(self):
        items = [((0,), 0), ((0,), 0), ((0,), 0), ((1,), 0)]
        graph = build_graph(2, 1, items)
        mv = majority_vote(answers([1, 1, -1, -1]), graph, rng())
        assert list(mv.values) == [1, -1]

    def test_tie_flips_coin(self):
        items = [((0,), 0), ((0,), 0)]
        graph = build_graph(1, 1, items)
        outs = {int(majority_vote(answers([1, -1]), graph, rng(s))[0]) for s in range(40)}
        assert outs == {-1, 1}

    def test_rejects_higher_degree(self):
        graph = build_graph(2, 1, [((0, 1), 0)])
        with pytest.raises(ValueError):
            majority_vote(answers([1]), graph, rng())

    def test_error_rate_shrinks_with_repeats(self):
        graph, truth, y = repetition_instance(500, 11, 3, [0.3, 0.3, 0.3], seed=5)
        mv = majority_vote(y, graph, rng(6))
        # 11 votes at eps=0.3: majority error ~ 0.078, an init answer: 0.3
        assert mv.hamming_fraction(truth) < 0.15


class TestOneCoinLogLikelihood:
    def test_hand_example(self):
        # single query answered +1 by a worker at eps=0.2:
        # ll = log(0.5 * (0.8 + 0.2)) = log 0.5
        graph = build_graph(1, 1, [((0,), 0)])
        ll = one_coin_log_likelihood(answers([1]), graph, np.array([0.2]))
        assert ll == pytest.approx(np.log(0.5))

    def test_two_agreeing_answers(self):
        # two +1 answers: ll = log(0.5 * (0.8^2 + 0.2^2))
        graph = build_graph(1, 1, [((0,), 0), ((0,), 0)])
        ll = one_coin_log_likelihood(answers([1, 1]), graph, np.array([0.2]))
        assert ll == pytest.approx(np.log(0.5 * (0.64 + 0.04)))


class TestEmOneCoin:
    def test_unanimous_workers_floor_at_lambda(self):
        graph, truth, y = repetition_instance(50, 5, 2, [0.0, 0.0], seed=9)
        est, state = em_one_coin(y, graph, lam=0.01, rng=rng(10))
        assert est == truth
        assert np.all(state.eps_hat == 0.01)

    def test_log_likelihood_non_decreasing(self):
        graph, truth, y = repetition_instance(200, 7, 4, [0.1, 0.2, 0.3, 0.4], seed=11)
        _, state = em_one_coin(y, graph, iters=30, rng=rng(12))
        lls = np.array(state.log_likelihoods)
        assert np.all(np.diff(lls) >= -1e-10)

    def test_posterior_and_rates_in_range(self):
        graph, truth, y = repetition_instance(100, 5, 3, [0.15, 0.25, 0.35], seed=13)
        _, state = em_one_coin(y, graph, lam=0.02, rng=rng(14))
        assert np.all((state.posterior >= 0) & (state.posterior <= 1))
        assert np.all((state.eps_hat >= 0.02) & (state.eps_hat <= 0.98))
        assert 1 <= state.iterations <= 50

    def test_early_stop_on_converged_posteriors(self):
        graph, truth, y = repetition_instance(30, 9, 1, [0.05], seed=15)
        _, state = em_one_coin(y, graph, iters=50, rng=rng(16))
        assert state.iterations < 50

    def test_downweights_adversarial_worker(self):
        # worker 0 lies 90% of the time; four honest workers at 5%.  EM
        # learns the rates and beats the plain majority, which the liar
        # drags down on every label it answers.
        m, per_label, w = 500, 5, 5
        graph, truth, y = repetition_instance(
            m, per_label, w, [0.9, 0.05, 0.05, 0.05, 0.05], seed=17
        )
        em_est, state = em_one_coin(y, graph, rng=rng(18))
        mv_est = majority_vote(y, graph, rng(19))
        em_err = em_est.hamming_fraction(truth)
        mv_err = mv_est.hamming_fraction(truth)
        assert state.eps_hat[0] > 0.6
        assert np.all(state.eps_hat[1:] < 0.15)
        assert em_err < mv_err
        assert em_err < 0.01

    def test_parameter_validation(self):
        graph, truth, y = repetition_instance(10, 3, 1, [0.1], seed=21)
        with pytest.raises(ValueError):
            em_one_coin(y, graph, iters=0)
        with pytest.raises(ValueError):
            em_one_coin(y, graph, lam=0.5)
        mixed = build_graph(2, 1, [((0, 1), 0)])
        with pytest.raises(ValueError):
            em_one_coin(answers([1]), mixed)
