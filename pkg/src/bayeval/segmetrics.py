"""Binarization and intersection-over-union scoring for segmentation masks.

Masks are 2-D numpy arrays: predictions hold finite reals, targets hold
exactly {0, 1}. Thresholding is inclusive on the upper side (a value equal to
the threshold maps to 1).
"""

import math

import numpy as np

from .errors import ParameterError


def _check_grid(arr, name):
    grid = np.asarray(arr, dtype=np.float64)
    if grid.ndim != 2 or grid.size == 0:
        raise ParameterError(f"{name} must be a nonempty 2-D grid")
    if not np.all(np.isfinite(grid)):
        raise ParameterError(f"{name} contains non-finite values")
    return grid


def _check_binary(arr, name):
    grid = _check_grid(arr, name)
    if not np.all((grid == 0.0) | (grid == 1.0)):
        raise ParameterError(f"{name} must be binary (values 0 or 1)")
    return grid.astype(np.uint8)


def binarize(pred, threshold=0.5):
    """Map values >= threshold to 1 and everything below to 0."""
    grid = _check_grid(pred, "prediction")
    threshold = float(threshold)
    if not math.isfinite(threshold):
        raise ParameterError(f"threshold must be finite, got {threshold}")
    return (grid >= threshold).astype(np.uint8)


def iou(a, b):
    """|a AND b| / |a OR b| for binary masks; two empty masks score 1.0.

    Symmetric; requires equal dimensions.
    """
    ga = _check_binary(a, "mask a")
    gb = _check_binary(b, "mask b")
    if ga.shape != gb.shape:
        raise ParameterError(f"mask dimensions differ: {ga.shape} vs {gb.shape}")
    union = int(np.logical_or(ga, gb).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(ga, gb).sum())
    return inter / union


def mean_iou(pairs, threshold=0.5):
    """Mean of iou(binarize(pred), target) over (pred, target) pairs."""
    values = per_pair_iou(pairs, threshold)
    return sum(values) / len(values)


def per_pair_iou(pairs, threshold=0.5):
    """IoU of each (pred, target) pair, in input order."""
    pairs = list(pairs)
    if not pairs:
        raise ParameterError("need at least one (prediction, target) pair")
    return [iou(binarize(pred, threshold), target) for pred, target in pairs]
