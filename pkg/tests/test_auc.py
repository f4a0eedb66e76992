"""Pairwise multi-class AUC against brute-force and scipy oracles."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from bayeval.auc import binary_auc, hand_till_auc, pairwise_separability
from bayeval.errors import ParameterError


def brute_force_binary(labels, scores, pos, neg):
    """O(n^2) pair counting: wins + half credit for ties."""
    pos_scores = [scores[k][pos] for k in range(len(labels)) if labels[k] == pos]
    neg_scores = [scores[k][pos] for k in range(len(labels)) if labels[k] == neg]
    total = 0.0
    for a in pos_scores:
        for b in neg_scores:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(pos_scores) * len(neg_scores))


def brute_force_hand_till(labels, scores):
    classes = sorted(set(labels))
    values = []
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            i, j = classes[a], classes[b]
            values.append(
                (brute_force_binary(labels, scores, i, j) + brute_force_binary(labels, scores, j, i)) / 2
            )
    return sum(values) / len(values)


def _random_dataset(rng, m, n):
    labels = rng.integers(0, m, size=n)
    # guarantee every class appears
    labels[:m] = np.arange(m)
    scores = rng.normal(size=(n, m)).round(1)  # rounding forces ties
    return labels, scores


class TestBinaryAuc:
    def test_mixed_ranks_example(self):
        # class-1 scores on column 1: {0.35, 0.8} vs class-0: {0.1, 0.4};
        # three of four pairs are ordered correctly.
        labels = np.array([0, 0, 1, 1])
        scores = np.array([[0.0, 0.1], [0.0, 0.4], [0.0, 0.35], [0.0, 0.8]])
        assert binary_auc(labels, scores, pos=1, neg=0) == 0.75

    def test_perfect_separation(self):
        labels = np.array([1, 1, 0, 0])
        scores = np.array([[0.0, 0.9], [0.0, 0.8], [0.0, 0.2], [0.0, 0.1]])
        assert binary_auc(labels, scores, 1, 0) == 1.0

    def test_all_ties_give_exactly_half(self):
        labels = np.array([0, 1, 0, 1, 1])
        scores = np.full((5, 2), 0.5)
        assert binary_auc(labels, scores, 0, 1) == 0.5

    def test_absent_class_is_undefined(self):
        labels = np.array([0, 0])
        scores = np.zeros((2, 2))
        assert binary_auc(labels, scores, 0, 1) is None

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        labels, scores = _random_dataset(rng, 2, int(rng.integers(4, 40)))
        fast = binary_auc(labels, scores, 0, 1)
        assert fast == pytest.approx(brute_force_binary(labels, scores, 0, 1), abs=1e-12)

    def test_matches_scipy_mannwhitneyu(self):
        rng = np.random.default_rng(5)
        labels, scores = _random_dataset(rng, 2, 60)
        x = scores[labels == 0, 0]
        y = scores[labels == 1, 0]
        u = scipy.stats.mannwhitneyu(x, y, alternative="two-sided").statistic
        assert binary_auc(labels, scores, 0, 1) == pytest.approx(
            u / (len(x) * len(y)), abs=1e-12
        )


class TestHandTill:
    def test_separable_dataset_scores_one(self):
        labels = np.array([0, 0, 1, 1, 2, 2])
        scores = np.eye(3)[labels] * 0.9 + 0.05
        assert hand_till_auc(labels, scores) == 1.0

    def test_identical_score_vectors_give_half(self):
        labels = np.array([0, 1, 2, 0, 1, 2])
        scores = np.tile([0.2, 0.3, 0.5], (6, 1))
        assert hand_till_auc(labels, scores) == 0.5

    @pytest.mark.parametrize("m", [2, 3, 4])
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_exhaustive_oracle(self, m, seed):
        rng = np.random.default_rng(seed * 10 + m)
        labels, scores = _random_dataset(rng, m, int(rng.integers(m + 2, 50)))
        assert hand_till_auc(labels, scores) == pytest.approx(
            brute_force_hand_till(labels.tolist(), scores.tolist()), abs=1e-12
        )

    def test_equals_mean_of_pairwise_values(self):
        rng = np.random.default_rng(17)
        labels, scores = _random_dataset(rng, 3, 30)
        pairs = pairwise_separability(labels, scores)
        assert hand_till_auc(labels, scores) == pytest.approx(
            sum(pairs.values()) / len(pairs), abs=1e-15
        )

    def test_binary_case_with_complementary_scores(self):
        # For probability scores (columns sum to 1) the two directions agree,
        # so the macro AUC reduces to the plain binary AUC.
        rng = np.random.default_rng(23)
        p = rng.uniform(size=40).round(2)
        scores = np.column_stack([p, 1.0 - p])
        labels = rng.integers(0, 2, size=40)
        labels[:2] = [0, 1]
        assert hand_till_auc(labels, scores) == pytest.approx(
            binary_auc(labels, scores, 0, 1), abs=1e-12
        )

    def test_rank_invariance_under_monotone_transforms(self):
        rng = np.random.default_rng(29)
        labels, scores = _random_dataset(rng, 3, 40)
        base = hand_till_auc(labels, scores)
        assert hand_till_auc(labels, np.exp(scores)) == base
        assert hand_till_auc(labels, scores * 7.5 + 3.0) == base

    def test_unpopulated_class_excluded_with_warning(self):
        labels = np.array([0, 0, 1, 1])
        scores = np.array([[0.9, 0.1, 0.0], [0.8, 0.2, 0.0], [0.1, 0.9, 0.0], [0.2, 0.8, 0.0]])
        with pytest.warns(UserWarning, match="class 2 has no samples"):
            pairs = pairwise_separability(labels, scores)
        assert set(pairs) == {(0, 1)}

    def test_single_populated_class_rejected(self):
        labels = np.array([1, 1, 1])
        scores = np.zeros((3, 3))
        with pytest.warns(UserWarning):
            with pytest.raises(ParameterError):
                hand_till_auc(labels, scores)


class TestValidation:
    def test_bad_inputs(self):
        with pytest.raises(ParameterError):
            binary_auc(np.array([0.5, 1.0]), np.zeros((2, 2)), 0, 1)
        with pytest.raises(ParameterError):
            binary_auc(np.array([0, 3]), np.zeros((2, 2)), 0, 1)
        with pytest.raises(ParameterError):
            binary_auc(np.array([0, 1]), np.zeros((2, 2)), 0, 0)
        with pytest.raises(ParameterError):
            binary_auc(np.array([0, 1]), np.array([[np.inf, 0], [0, 1]]), 0, 1)
        with pytest.raises(ParameterError):
            hand_till_auc(np.array([0, 1]), np.zeros((2, 1)))
