import numpy as np
import pytest

from featrank import mi
from featrank.rankers import (Method, RankerSettings, aggregate_ovr_scores,
                              fit_ranker, rank_ard, rank_lasso, rank_mrmr,
                              rank_relieff, rank_spike_slab)

from conftest import make_logistic_data


def relieff_brute(X, y, k):
    """Literal re-derivation of the weight update, used as an oracle."""
    X = np.asarray(X, float)
    y = np.asarray(y)
    n, p = X.shape
    span = X.max(0) - X.min(0)
    span = np.where(span > 0, span, np.inf)  # constant features give diff 0
    classes, counts = np.unique(y, return_counts=True)
    prior = dict(zip(classes.tolist(), (counts / n).tolist()))
    w = np.zeros(p)
    for i in range(n):
        d = np.sqrt(((X - X[i]) ** 2).sum(axis=1))
        for c in classes:
            cand = [t for t in range(n) if y[t] == c and t != i]
            cand.sort(key=lambda t: (d[t], t))
            near = cand[:k]
            for t in near:
                diff = np.abs(X[i] - X[t]) / span
                if c == y[i]:
                    w -= diff / (n * k)
                else:
                    coef = prior[c] / (1.0 - prior[y[i]])
                    w += coef * diff / (n * k)
    return w


class TestRankRelieff:
    def test_separator_beats_noise(self):
        rng = np.random.default_rng(0)
        y = np.array([0, 1] * 50)
        X = np.column_stack([y.astype(float), rng.normal(size=100)])
        r = rank_relieff(X, y, neighbors=5)
        assert r.order[0] == 0
        assert r.scores[0] > r.scores[1]

    def test_constant_features_rank_by_index(self):
        X = np.ones((12, 3))
        y = np.array([0, 1] * 6)
        r = rank_relieff(X, y, neighbors=2)
        np.testing.assert_array_equal(r.scores, 0.0)
        assert r.order.tolist() == [0, 1, 2]

    def test_four_point_hand_trace(self):
        # 1-neighbor pass worked through by hand:
        # feature 0 gains 0.9 from misses and loses 0.1 from hits;
        # feature 1 only accumulates the four unit hit differences
        X = np.array([[0.0, 0.0], [0.1, 1.0], [1.0, 0.0], [0.9, 1.0]])
        y = np.array([0, 0, 1, 1])
        r = rank_relieff(X, y, neighbors=1)
        np.testing.assert_allclose(r.scores, [0.8, -1.0], atol=1e-12)
        assert r.order.tolist() == [0, 1]

    def test_matches_bruteforce_oracle(self):
        for seed in range(4):
            X, y, _ = make_logistic_data(40, 5, planted=[0, 1], seed=seed)
            r = rank_relieff(X, y, neighbors=3)
            np.testing.assert_allclose(r.scores, relieff_brute(X, y, 3),
                                       atol=1e-10)

    def test_multiclass_matches_bruteforce(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(45, 4))
        y = np.repeat(np.arange(3), 15)
        X[:, 0] += 1.5 * y
        r = rank_relieff(X, y, neighbors=4)
        np.testing.assert_allclose(r.scores, relieff_brute(X, y, 4),
                                   atol=1e-10)
        assert r.order[0] == 0

    def test_row_permutation_invariance(self):
        X, y, _ = make_logistic_data(30, 4, planted=[0], seed=5)
        perm = np.random.default_rng(0).permutation(30)
        a = rank_relieff(X, y, neighbors=3)
        b = rank_relieff(X[perm], y[perm], neighbors=3)
        np.testing.assert_allclose(a.scores, b.scores, atol=1e-12)

    def test_default_neighbors_clamped_to_class_size(self):
        X, y, _ = make_logistic_data(12, 2, planted=[0], seed=1)
        r = rank_relieff(X, y)  # classes smaller than 11
        assert r.meta["neighbors"] < 10

    def test_explicit_neighbors_too_large_errors(self):
        X, y, _ = make_logistic_data(12, 2, planted=[0], seed=1)
        with pytest.raises(ValueError, match="more than"):
            rank_relieff(X, y, neighbors=11)


class TestRankMrmr:
    def test_redundant_duplicate_is_deferred(self):
        # A strongly predicts the class, A2 duplicates A, B is weaker but
        # carries fresh information; the redundancy penalty must push A2
        # behind B
        rng = np.random.default_rng(12)
        n = 400
        y = np.array([0, 1] * (n // 2))
        flip_a = rng.random(n) < 0.1
        flip_b = rng.random(n) < 0.35
        A = np.where(flip_a, 1 - y, y).astype(float)
        B = np.where(flip_b, 1 - y, y).astype(float)
        X = np.column_stack([A, A.copy(), B])
        r = rank_mrmr(X, y, bins=2)
        assert r.order.tolist()[0] == 0
        assert r.order.tolist()[1] == 2
        # direct evaluation of the step-2 criterion confirms the order
        cols = [mi.discretize_equal_frequency(X[:, j], 2) for j in range(3)]
        ycol = mi.from_labels(y)
        crit_a2 = (mi.mutual_information(cols[1], ycol)
                   - mi.mutual_information(cols[1], cols[0]))
        crit_b = (mi.mutual_information(cols[2], ycol)
                  - mi.mutual_information(cols[2], cols[0]))
        assert crit_b > crit_a2
        assert r.scores[2] == pytest.approx(crit_b, abs=1e-12)

    def test_single_feature(self):
        y = np.array([0, 1, 0, 1, 0, 1])
        X = np.array([1.0, 5.0, 2.0, 6.0, 1.5, 5.5]).reshape(-1, 1)
        r = rank_mrmr(X, y, bins=2)
        assert r.order.tolist() == [0]
        cols = mi.discretize_equal_frequency(X[:, 0], 2)
        assert r.scores[0] == pytest.approx(
            mi.mutual_information(cols, mi.from_labels(y)), abs=1e-12)

    def test_identical_features_fall_back_to_index_order(self):
        y = np.array([0, 1] * 10)
        x = y.astype(float)
        X = np.column_stack([x, x, x, x])
        r = rank_mrmr(X, y, bins=2)
        assert r.order.tolist() == [0, 1, 2, 3]
        assert np.all(r.scores[1:] < r.scores[0])

    def test_first_pick_maximizes_class_relevance(self):
        for seed in range(3):
            X, y, _ = make_logistic_data(120, 6, planted=[2], magnitude=3.0,
                                         seed=seed)
            r = rank_mrmr(X, y, bins=4)
            cols = [mi.discretize_equal_frequency(X[:, j], 4)
                    for j in range(6)]
            rel = [mi.mutual_information(c, mi.from_labels(y)) for c in cols]
            assert r.order[0] == int(np.argmax(rel))


class TestRankLasso:
    def test_pure_noise_collapses_to_zero_scores(self):
        rng = np.random.default_rng(40)
        X = rng.normal(size=(500, 8))
        X = (X - X.mean(0)) / X.std(0, ddof=1)
        y = rng.integers(0, 2, size=500)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        r = rank_lasso(X, y, seed=0)
        assert np.mean(r.scores == 0.0) >= 0.5

    def test_dominant_feature_ranks_first(self):
        X, y, _ = make_logistic_data(300, 6, planted=[4], magnitude=3.0,
                                     seed=41)
        r = rank_lasso(X, y, seed=1)
        assert r.order[0] == 4

    def test_single_feature(self):
        X, y, _ = make_logistic_data(60, 1, planted=[0], seed=42)
        r = rank_lasso(X, y, seed=0)
        assert r.order.tolist() == [0]

    def test_multiclass_uses_ovr_mean(self):
        rng = np.random.default_rng(43)
        y = np.repeat(np.arange(3), 40)
        X = rng.normal(size=(120, 5))
        X[:, 1] += 2.0 * (y == 2)
        X = (X - X.mean(0)) / X.std(0, ddof=1)
        r = rank_lasso(X, y, seed=2)
        assert r.order[0] == 1
        assert "one-vs-rest" in r.meta["multiclass"]
        assert len(r.meta["lambda"]) == 3

    def test_deterministic_given_seed(self):
        X, y, _ = make_logistic_data(90, 4, planted=[0], seed=44)
        a = rank_lasso(X, y, seed=7)
        b = rank_lasso(X, y, seed=7)
        np.testing.assert_array_equal(a.scores, b.scores)
        np.testing.assert_array_equal(a.order, b.order)

    def test_single_class_errors(self):
        X = np.zeros((10, 2))
        with pytest.raises(ValueError):
            rank_lasso(X, np.zeros(10, dtype=int), seed=0)


class TestRankSpikeSlab:
    def test_informative_feature_top_ranked(self):
        rng = np.random.default_rng(50)
        x = rng.normal(size=500)
        y = (x > 0).astype(int)
        X = np.column_stack([x] + [rng.normal(size=500) for _ in range(5)])
        X = (X - X.mean(0)) / X.std(0, ddof=1)
        r = rank_spike_slab(X, y)
        assert r.order[0] == 0
        assert r.scores[0] > 0.9

    def test_all_noise_scores_stay_low(self):
        rng = np.random.default_rng(51)
        X = rng.normal(size=(500, 10))
        X = (X - X.mean(0)) / X.std(0, ddof=1)
        y = rng.integers(0, 2, size=500)
        r = rank_spike_slab(X, y)
        assert np.all(r.scores < 0.7)

    def test_four_class_ovr_aggregation(self):
        rng = np.random.default_rng(52)
        y = np.repeat(np.arange(4), 60)
        X = rng.normal(size=(240, 8))
        for c in range(4):
            X[:, c] += 2.5 * (y == c)
        X = (X - X.mean(0)) / X.std(0, ddof=1)
        r = rank_spike_slab(X, y)
        assert set(r.order[:4].tolist()) == {0, 1, 2, 3}


class TestRankArd:
    def test_informative_above_noise(self):
        X, y, _ = make_logistic_data(400, 4, planted=[2], magnitude=2.5,
                                     seed=60)
        r = rank_ard(X, y)
        assert r.order[0] == 2
        assert r.scores[2] > 0.9
        assert r.scores[2] > max(r.scores[j] for j in (0, 1, 3))

    def test_collinear_pair_terminates_finite(self):
        X, y, _ = make_logistic_data(200, 2, planted=[0], seed=61)
        Xd = np.column_stack([X[:, 0], X[:, 0], X[:, 1]])
        r = rank_ard(Xd, y)
        assert np.isfinite(r.scores).all()

    def test_huge_threshold_kills_all_scores(self):
        X, y, _ = make_logistic_data(200, 4, planted=[0], seed=62)
        r = rank_ard(X, y, settings=RankerSettings(ard_epsilon=100.0))
        assert np.all(r.scores < 1e-6)
        assert r.order.tolist() == [0, 1, 2, 3]


class TestAggregate:
    def test_elementwise_mean(self):
        out = aggregate_ovr_scores([[0.9, 0.1], [0.5, 0.3]])
        np.testing.assert_allclose(out, [0.7, 0.2])

    def test_single_class_identity(self):
        np.testing.assert_allclose(aggregate_ovr_scores([[0.4, 0.6]]),
                                   [0.4, 0.6])

    def test_constant_idempotence(self):
        v = [0.2, 0.8, 0.5]
        np.testing.assert_allclose(aggregate_ovr_scores([v] * 4), v)

    def test_mismatched_lengths_error(self):
        with pytest.raises(ValueError):
            aggregate_ovr_scores([[0.1, 0.2], [0.3]])

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            aggregate_ovr_scores([])


class TestRankingInvariants:
    def test_order_consistent_with_scores(self):
        X, y, _ = make_logistic_data(150, 7, planted=[0, 3], seed=70)
        for method in (Method.RELIEFF, Method.LASSO, Method.SPIKE_SLAB,
                       Method.ARD):
            r = fit_ranker(method, X, y, RankerSettings(), seed=0)
            s = r.scores[r.order]
            assert np.all(s[:-1] >= s[1:])
            assert sorted(r.order.tolist()) == list(range(7))
            # equal scores appear in ascending index order
            for i in range(len(s) - 1):
                if s[i] == s[i + 1]:
                    assert r.order[i] < r.order[i + 1]

    def test_mrmr_order_is_permutation(self):
        X, y, _ = make_logistic_data(150, 7, planted=[0, 3], seed=70)
        r = rank_mrmr(X, y)
        assert sorted(r.order.tolist()) == list(range(7))

    def test_argsort_invariance_under_positive_scaling(self):
        X, y, _ = make_logistic_data(120, 6, planted=[1, 4], seed=71)
        r = rank_lasso(X, y, seed=3)
        order = np.argsort(-(r.scores * 7.3), kind="stable")
        np.testing.assert_array_equal(order, r.order)
