"""Multi-class AUC via macro-averaged pairwise one-vs-one separability.

For each ordered class pair, A(i|j) is the probability that a random class-i
sample outranks a random class-j sample on score column i, computed by rank
sums (the Mann-Whitney identity) with ties worth half credit. Unordered pairs
average the two directions and the multi-class AUC is the mean over pairs.
Only ranks matter: any strictly increasing transform of a score column leaves
every value unchanged, so probabilities vs. logits is immaterial.
"""

import warnings

import numpy as np

from ._ranks import average_ranks
from .errors import ParameterError


def _check_dataset(labels, scores):
    labels = np.asarray(labels)
    if not np.issubdtype(labels.dtype, np.integer):
        raise ParameterError("labels must be integer class indices")
    labels = labels.astype(np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise ParameterError("scores must be an (n, M) matrix")
    n, m = scores.shape
    if m < 2:
        raise ParameterError("scores must cover at least 2 classes")
    if labels.shape != (n,):
        raise ParameterError("labels and scores disagree on the sample count")
    if n and (labels.min() < 0 or labels.max() >= m):
        raise ParameterError(f"labels must lie in [0, {m})")
    if not np.all(np.isfinite(scores)):
        raise ParameterError("scores must be finite")
    return labels, scores


def binary_auc(labels, scores, pos, neg):
    """Separability A(pos|neg) on score column ``pos``; ties count 1/2.

    Restricted to samples of the two classes. Returns None when either class
    has no samples (undefined-metric signal).
    """
    labels, scores = _check_dataset(labels, scores)
    m = scores.shape[1]
    for c in (pos, neg):
        if not 0 <= c < m:
            raise ParameterError(f"class index {c} out of range [0, {m})")
    if pos == neg:
        raise ParameterError("pos and neg must differ")
    mask = (labels == pos) | (labels == neg)
    sub_labels = labels[mask]
    sub_scores = scores[mask, pos]
    n_pos = int(np.sum(sub_labels == pos))
    n_neg = int(np.sum(sub_labels == neg))
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = average_ranks(sub_scores)
    rank_sum = float(np.sum(ranks[sub_labels == pos]))
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def pairwise_separability(labels, scores):
    """Symmetrized separability for every populated unordered class pair.

    Returns {(i, j): (A(i|j) + A(j|i)) / 2} for i < j. Classes with no
    samples are excluded from pairing with a warning.
    """
    labels, scores = _check_dataset(labels, scores)
    m = scores.shape[1]
    present = [c for c in range(m) if np.any(labels == c)]
    for c in range(m):
        if c not in present:
            warnings.warn(f"class {c} has no samples; excluded from AUC pairing")
    if len(present) < 2:
        raise ParameterError("need at least 2 populated classes for multi-class AUC")
    pairs = {}
    for a in range(len(present)):
        for b in range(a + 1, len(present)):
            i, j = present[a], present[b]
            a_ij = binary_auc(labels, scores, i, j)
            a_ji = binary_auc(labels, scores, j, i)
            pairs[(i, j)] = (a_ij + a_ji) / 2.0
    return pairs


def hand_till_auc(labels, scores):
    """Macro-averaged multi-class AUC: mean of the pairwise separabilities.

    With all M classes populated this is (2 / (M (M-1))) * sum over pairs.
    For M = 2 with complementary score columns (probabilities) it reduces to
    the ordinary binary AUC.
    """
    pairs = pairwise_separability(labels, scores)
    total = 0.0
    for key in sorted(pairs):
        total += pairs[key]
    return total / len(pairs)
