"""Brixia severity scores and their comparison with relevance heatmaps.

The Brixia system grades six lung zones (A-C top-to-bottom in one lung, D-F
in the other) 0-3 each; the overall score is their sum (0-18). This module
models those scores, partitions heatmaps into the six zones, aggregates
positive relevance per zone (positive values are evidence for the tagged
class; negative values belong to other classes and must not cancel), and
quantifies agreement with rank correlations: per record between partial
scores and zone relevance, and across records between overall scores and
predicted probabilities.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._ranks import average_ranks
from .errors import ParameterError

ZONE_LABELS = ("A", "B", "C", "D", "E", "F")


def overall_score(partials):
    """Sum of the six partial scores; each must be an integer in [0, 3]."""
    partials = tuple(partials)
    if len(partials) != 6:
        raise ParameterError(f"expected 6 partial scores, got {len(partials)}")
    for p in partials:
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or not 0 <= p <= 3:
            raise ParameterError(f"partial scores must be integers in [0, 3], got {p!r}")
    return int(sum(partials))


@dataclass(frozen=True)
class BrixiaScore:
    """Six partial zone scores, ordered A..F."""

    partials: tuple[int, int, int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "partials", tuple(int(p) for p in self.partials))
        overall_score(self.partials)

    @property
    def overall(self):
        return sum(self.partials)


@dataclass(frozen=True)
class Zone:
    """Half-open pixel rectangle [row_start, row_stop) x [col_start, col_stop)."""

    label: str
    row_start: int
    row_stop: int
    col_start: int
    col_stop: int

    def __post_init__(self):
        if self.row_start < 0 or self.col_start < 0:
            raise ParameterError("zone bounds must be nonnegative")
        if self.row_stop <= self.row_start or self.col_stop <= self.col_start:
            raise ParameterError(f"zone {self.label} is empty")


@dataclass(frozen=True)
class ZonePartition:
    """Six zones: two column-disjoint lung boxes, each split into three bands."""

    zones: tuple[Zone, ...]

    def __post_init__(self):
        zones = tuple(self.zones)
        if tuple(z.label for z in zones) != ZONE_LABELS:
            raise ParameterError("zones must be labeled A..F in order")
        first, second = zones[:3], zones[3:]
        for group in (first, second):
            cols = {(z.col_start, z.col_stop) for z in group}
            if len(cols) != 1:
                raise ParameterError("zones of one lung must share the column range")
            for upper, lower in zip(group, group[1:]):
                if upper.row_stop != lower.row_start:
                    raise ParameterError(
                        f"bands {upper.label} and {lower.label} must be contiguous"
                    )
        a, d = first[0], second[0]
        if not (a.col_stop <= d.col_start or d.col_stop <= a.col_start):
            raise ParameterError("the two lung boxes must not overlap in columns")
        object.__setattr__(self, "zones", zones)


def _check_box(box):
    try:
        r0, r1, c0, c1 = (int(v) for v in box)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"a lung box must be (row_start, row_stop, col_start, col_stop): {exc}") from None
    if r0 < 0 or c0 < 0 or r1 <= r0 or c1 <= c0:
        raise ParameterError(f"invalid lung box {box!r}")
    return r0, r1, c0, c1


def _order_boxes(boxes, boundaries, abc_side):
    if abc_side not in ("left", "right"):
        raise ParameterError(f"abc_side must be 'left' or 'right', got {abc_side!r}")
    if len(boxes) != 2:
        raise ParameterError(f"expected 2 lung boxes, got {len(boxes)}")
    checked = [_check_box(b) for b in boxes]
    paired = sorted(zip(checked, boundaries), key=lambda t: t[0][2])
    (left, left_bounds), (right, right_bounds) = paired
    if not left[3] <= right[2]:
        raise ParameterError("lung boxes must not overlap in columns")
    if abc_side == "left":
        return (left, left_bounds), (right, right_bounds)
    return (right, right_bounds), (left, left_bounds)


def _bands(box, bounds):
    r0, r1, c0, c1 = box
    if bounds is None:
        if r1 - r0 < 3:
            raise ParameterError(f"box rows [{r0}, {r1}) too short to split into 3 bands")
        third = (r1 - r0) // 3
        b1, b2 = r0 + third, r0 + 2 * third
    else:
        try:
            b1, b2 = (int(v) for v in bounds)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"row boundaries must be two integers: {exc}") from None
        if not r0 < b1 < b2 < r1:
            raise ParameterError(
                f"row boundaries {b1}, {b2} must lie strictly inside [{r0}, {r1})"
            )
    return ((r0, b1, c0, c1), (b1, b2, c0, c1), (b2, r1, c0, c1))


def _build_partition(boxes, boundaries, abc_side):
    (abc_box, abc_bounds), (def_box, def_bounds) = _order_boxes(boxes, boundaries, abc_side)
    rects = _bands(abc_box, abc_bounds) + _bands(def_box, def_bounds)
    zones = tuple(
        Zone(label, r0, r1, c0, c1)
        for label, (r0, r1, c0, c1) in zip(ZONE_LABELS, rects)
    )
    return ZonePartition(zones)


def default_partition(boxes, abc_side="left"):
    """Split each lung box into three equal-height bands (remainder rows go
    to the lowest band). A/B/C go to the leftmost box when abc_side='left',
    to the rightmost when 'right'.
    """
    return _build_partition(boxes, (None, None), abc_side)


def partition_from_boxes(boxes, boundaries, abc_side="left"):
    """Partition with explicit per-box row boundaries (expert-provided lines).

    ``boundaries[i]`` gives the two interior row coordinates for ``boxes[i]``.
    """
    if len(boundaries) != len(boxes):
        raise ParameterError("need one (row, row) boundary pair per box")
    return _build_partition(boxes, tuple(boundaries), abc_side)


def zone_relevance(relevance, partition):
    """Per-zone sum of positive relevance, ordered A..F.

    Negative relevance is evidence for other classes and is ignored rather
    than allowed to cancel positive evidence.
    """
    grid = np.asarray(relevance, dtype=np.float64)
    if grid.ndim != 2 or grid.size == 0:
        raise ParameterError("relevance map must be a nonempty 2-D grid")
    if not np.all(np.isfinite(grid)):
        raise ParameterError("relevance map contains non-finite values")
    h, w = grid.shape
    out = np.zeros(6, dtype=np.float64)
    for idx, zone in enumerate(partition.zones):
        if zone.row_stop > h or zone.col_stop > w:
            raise ParameterError(
                f"zone {zone.label} exceeds the {h}x{w} map bounds"
            )
        region = grid[zone.row_start : zone.row_stop, zone.col_start : zone.col_stop]
        out[idx] = float(region[region > 0.0].sum())
    return out


def spearman(x, y):
    """Rank correlation with average ranks for ties; None if a side is constant."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1 or xv.shape[0] != yv.shape[0]:
        raise ParameterError("inputs must be 1-D vectors of equal length")
    if xv.shape[0] < 3:
        raise ParameterError("need at least 3 points for a rank correlation")
    if not (np.all(np.isfinite(xv)) and np.all(np.isfinite(yv))):
        raise ParameterError("inputs must be finite")
    if np.all(xv == xv[0]) or np.all(yv == yv[0]):
        return None
    rx = average_ranks(xv)
    ry = average_ranks(yv)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    return float((dx * dy).sum() / math.sqrt((dx * dx).sum() * (dy * dy).sum()))


@dataclass(frozen=True)
class StudyRecord:
    """One scored X-ray: partial scores, relevance map, predicted probability."""

    identifier: str
    score: BrixiaScore
    relevance: np.ndarray
    covid_probability: float
    partition: ZonePartition

    def __post_init__(self):
        p = float(self.covid_probability)
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"probability must be in [0, 1], got {p}")
        object.__setattr__(self, "covid_probability", p)


@dataclass(frozen=True)
class RecordResult:
    identifier: str
    zone_relevance: np.ndarray
    rho: float | None
    top_zone_mismatch: bool


@dataclass(frozen=True)
class StudyReport:
    records: tuple[RecordResult, ...]
    overall_rho: float | None
    flagged: tuple[str, ...]


def study_report(records):
    """Agreement report over a study of scored, heatmapped records.

    Per record: Spearman rho between the six partial scores and the six zone
    relevances, plus a flag when no maximally-relevant zone is among the
    top-scored zones. Across records: Spearman rho between overall scores and
    predicted probabilities.
    """
    records = list(records)
    if len(records) < 3:
        raise ParameterError(f"need at least 3 records, got {len(records)}")
    results = []
    flagged = []
    for rec in records:
        zr = zone_relevance(rec.relevance, rec.partition)
        partials = np.asarray(rec.score.partials, dtype=np.float64)
        rho = spearman(partials, zr)
        top_relevance = set(np.flatnonzero(zr == zr.max()).tolist())
        top_score = set(np.flatnonzero(partials == partials.max()).tolist())
        mismatch = not (top_relevance & top_score)
        if mismatch:
            flagged.append(rec.identifier)
        results.append(
            RecordResult(
                identifier=rec.identifier,
                zone_relevance=zr,
                rho=rho,
                top_zone_mismatch=mismatch,
            )
        )
    overalls = [rec.score.overall for rec in records]
    probabilities = [rec.covid_probability for rec in records]
    return StudyReport(
        records=tuple(results),
        overall_rho=spearman(overalls, probabilities),
        flagged=tuple(flagged),
    )
