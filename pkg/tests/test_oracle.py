import itertools
import math

import numpy as np
import pytest
from conftest import answers, build_graph

from xorcrowd.model import (
    ConfigError,
    DegreeDistribution,
    LabelVector,
    ReliabilityMatrix,
)
from xorcrowd.noise import DEGREE_INDEPENDENT, NoiseSpec, answer_queries, build_reliability
from xorcrowd.oracle import M_MAX, log_likelihood, ml_decode
from xorcrowd.querygen import QueryGenConfig, generate_queries


def rng(seed=0):
    return np.random.default_rng(seed)


def brute_force_lls(y, graph, reliability):
    """Log-likelihood of every candidate by direct per-query products."""
    out = {}
    for signs in itertools.product((1, -1), repeat=graph.m):
        ll = 0.0
        for q in graph.queries:
            prod = 1
            for i in q.labels:
                prod *= signs[i]
            eps = reliability.value(q.worker, q.degree)
            p = (1.0 - eps) if prod == y[q.id] else eps
            ll += math.log(p) if p > 0 else -math.inf
        out[signs] = ll
    return out


class TestLogLikelihood:
    def test_hand_computed(self):
        # two queries, eps=0.2: one match, one miss
        graph = build_graph(2, 1, [((0,), 0), ((0, 1), 0)])
        y = answers([1, -1])
        rel = ReliabilityMatrix.unchecked(np.full((1, 2), 0.2))
        x = LabelVector([1, 1])  # products: +1 (match), +1 (miss)
        expected = math.log(0.8) + math.log(0.2)
        assert log_likelihood(x, y, graph, rel) == pytest.approx(expected)

    def test_impossible_candidate(self):
        graph = build_graph(1, 1, [((0,), 0)])
        rel = ReliabilityMatrix.unchecked(np.array([[0.0]]))
        assert log_likelihood(LabelVector([-1]), answers([1]), graph, rel) == -math.inf
        assert log_likelihood(LabelVector([1]), answers([1]), graph, rel) == 0.0

    def test_dimension_checks(self):
        graph = build_graph(2, 1, [((0, 1), 0)])
        rel = ReliabilityMatrix.unchecked(np.full((1, 2), 0.2))
        with pytest.raises(ValueError):
            log_likelihood(LabelVector([1]), answers([1]), graph, rel)
        with pytest.raises(ValueError):
            log_likelihood(LabelVector([1, 1]), answers([1, 1]), graph, rel)


class TestMlDecode:
    def test_matches_brute_force_scores(self):
        # thirty random small instances: the reported maximum equals the
        # maximum over the full table, and the pick attains it
        for seed in range(30):
            r = rng(seed)
            m = int(r.integers(2, 7))
            w = int(r.integers(1, 4))
            n = int(r.integers(m, 4 * m + 1))
            phi = DegreeDistribution.uniform_over(range(1, min(m, 3) + 1))
            graph = generate_queries(
                QueryGenConfig(
                    m=m, n=n, w=w, phi=phi, degree1_init=False, seed=seed + 100
                )
            )
            eps = r.uniform(0.05, 0.45, size=(w, min(m, 3)))
            rel = ReliabilityMatrix.unchecked(eps)
            truth = LabelVector.random(m, r)
            y = answer_queries(truth, graph, rel, r)
            rep = ml_decode(y, graph, rel, rng(seed + 1))
            table = brute_force_lls(y, graph, rel)
            assert rep.log_likelihood == pytest.approx(max(table.values()))
            assert table[tuple(int(v) for v in rep.best.values)] == pytest.approx(
                rep.log_likelihood
            )
            want_ties = sum(
                1 for v in table.values() if v == pytest.approx(max(table.values()), abs=1e-12)
            )
            assert rep.tie_count <= want_ties

    def test_noiseless_recovers_truth(self):
        phi = DegreeDistribution.point_mass(2)
        graph = generate_queries(QueryGenConfig(m=6, n=40, w=1, phi=phi, seed=7))
        truth = LabelVector.random(6, rng(8))
        rel = ReliabilityMatrix.unchecked(np.zeros((1, 2)))
        y = answer_queries(truth, graph, rel, rng(9))
        rep = ml_decode(y, graph, rel, rng(10))
        assert rep.best == truth
        assert rep.tie_count == 1
        assert rep.log_likelihood == 0.0

    def test_uninformative_instance_ties_everything(self):
        # a single degree-1 query at eps=0.5 cannot distinguish +1 from -1
        graph = build_graph(1, 1, [((0,), 0)])
        rel = ReliabilityMatrix.unchecked(np.array([[0.5]]))
        rep = ml_decode(answers([1]), graph, rel, rng(11))
        assert rep.tie_count == 2

    def test_tie_pick_is_uniform_over_seeds(self):
        graph = build_graph(1, 1, [((0,), 0)])
        rel = ReliabilityMatrix.unchecked(np.array([[0.5]]))
        picks = {
            int(ml_decode(answers([1]), graph, rel, rng(s)).best[0]) for s in range(30)
        }
        assert picks == {-1, 1}

    def test_answer_flip_symmetry(self):
        # negating all degree-1 answers mirrors the posterior: the best
        # log-likelihood is unchanged and the best vector negates.  Five
        # queries per label keep every per-label vote odd, so the argmax
        # is unique and negation is exact.
        items = [((i,), k % 2) for i in range(5) for k in range(5)]
        graph = build_graph(5, 2, items)
        rel = ReliabilityMatrix.unchecked(np.full((2, 1), 0.2))
        truth = LabelVector.random(5, rng(14))
        y = answer_queries(truth, graph, rel, rng(15))
        a = ml_decode(y, graph, rel, rng(16))
        b = ml_decode(answers(-y.values), graph, rel, rng(16))
        assert a.log_likelihood == pytest.approx(b.log_likelihood)
        assert a.tie_count == b.tie_count == 1
        assert b.best == -a.best

    def test_size_guard(self):
        phi = DegreeDistribution.point_mass(1)
        graph = generate_queries(
            QueryGenConfig(m=M_MAX + 1, n=M_MAX + 1, w=1, phi=phi, seed=17)
        )
        rel = ReliabilityMatrix.unchecked(np.full((1, 1), 0.2))
        y = answers(np.ones(M_MAX + 1, dtype=np.int8))
        with pytest.raises(ConfigError):
            ml_decode(y, graph, rel, rng(18))

    def test_missing_rate_rejected(self):
        graph = build_graph(2, 1, [((0,), 0), ((0, 1), 0)])
        eps = np.array([[0.2, np.nan]])
        rel = ReliabilityMatrix.unchecked(eps)
        with pytest.raises(ConfigError):
            ml_decode(answers([1, 1]), graph, rel, rng(19))
        too_narrow = ReliabilityMatrix.unchecked(np.array([[0.2]]))
        with pytest.raises(ConfigError):
            ml_decode(answers([1, 1]), graph, too_narrow, rng(20))
