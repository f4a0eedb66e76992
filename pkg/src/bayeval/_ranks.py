"""Average-rank assignment shared by the AUC and rank-correlation code."""

import numpy as np


def average_ranks(values):
    """1-based ranks with ties replaced by the mean rank of the tied group."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.shape[0], dtype=np.float64)
    i = 0
    n = v.shape[0]
    while i < n:
        j = i
        while j + 1 < n and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks
