"""Severity scores, zone partitions, relevance aggregation, rank correlation."""

import numpy as np
import pytest

from bayeval.brixia import (
    BrixiaScore,
    StudyRecord,
    Zone,
    ZonePartition,
    default_partition,
    overall_score,
    partition_from_boxes,
    spearman,
    study_report,
    zone_relevance,
)
from bayeval.errors import ParameterError

BOXES = ((0, 90, 0, 40), (0, 90, 50, 90))


class TestOverallScore:
    def test_bounds(self):
        assert overall_score([0, 0, 0, 0, 0, 0]) == 0
        assert overall_score([3, 3, 3, 3, 3, 3]) == 18
        assert overall_score([1, 0, 0, 0, 0, 0]) == 1

    def test_rejects_out_of_range(self):
        for bad in ([4, 0, 0, 0, 0, 0], [-1, 0, 0, 0, 0, 0], [0.5] * 6, [1] * 5, [1] * 7):
            with pytest.raises(ParameterError):
                overall_score(bad)

    def test_score_dataclass_mirrors_sum(self):
        score = BrixiaScore((2, 3, 1, 0, 2, 1))
        assert score.overall == 9


class TestPartitions:
    def test_equal_thirds(self):
        part = default_partition(BOXES)
        rows = [(z.row_start, z.row_stop) for z in part.zones[:3]]
        assert rows == [(0, 30), (30, 60), (60, 90)]

    def test_remainder_goes_to_bottom_band(self):
        part = default_partition(((0, 10, 0, 4), (0, 10, 5, 9)))
        heights = [z.row_stop - z.row_start for z in part.zones[:3]]
        assert heights == [3, 3, 4]

    def test_six_disjoint_zones(self):
        part = default_partition(BOXES)
        assert len(part.zones) == 6
        cells = set()
        for zone in part.zones:
            for r in range(zone.row_start, zone.row_stop):
                for c in range(zone.col_start, zone.col_stop):
                    assert (r, c) not in cells
                    cells.add((r, c))
        assert len(cells) == 2 * 90 * 40

    def test_degenerate_box_rejected(self):
        with pytest.raises(ParameterError):
            default_partition(((0, 2, 0, 4), (0, 10, 5, 9)))

    def test_overlapping_columns_rejected(self):
        with pytest.raises(ParameterError):
            default_partition(((0, 9, 0, 6), (0, 9, 5, 9)))

    def test_laterality_swap(self):
        left_first = default_partition(BOXES, abc_side="left")
        right_first = default_partition(BOXES, abc_side="right")
        assert left_first.zones[0].col_start == 0
        assert right_first.zones[0].col_start == 50
        assert right_first.zones[3].col_start == 0

    def test_explicit_boundaries(self):
        part = partition_from_boxes(BOXES, ((10, 40), (20, 70)))
        assert [(z.row_start, z.row_stop) for z in part.zones[:3]] == [(0, 10), (10, 40), (40, 90)]
        assert [(z.row_start, z.row_stop) for z in part.zones[3:]] == [(0, 20), (20, 70), (70, 90)]
        with pytest.raises(ParameterError):
            partition_from_boxes(BOXES, ((10, 95), (20, 70)))

    def test_partition_validation(self):
        zones = [Zone(label, 0, 10, 0, 5) for label in "ABCDEF"]
        with pytest.raises(ParameterError):
            ZonePartition(tuple(zones))  # bands not contiguous / boxes overlap


class TestZoneRelevance:
    def test_uniform_positive_map(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        values = zone_relevance(np.ones((9, 10)), part)
        assert np.array_equal(values, [15.0, 15.0, 15.0, 15.0, 15.0, 15.0])

    def test_all_negative_map_gives_zeros(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        assert zone_relevance(-np.ones((9, 10)), part).sum() == 0.0

    def test_single_zone_support_counts_pixels(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        grid = np.zeros((9, 10))
        zone_b = part.zones[1]
        grid[zone_b.row_start : zone_b.row_stop, zone_b.col_start : zone_b.col_stop] = 1.0
        values = zone_relevance(grid, part)
        expected = np.zeros(6)
        expected[1] = (zone_b.row_stop - zone_b.row_start) * (zone_b.col_stop - zone_b.col_start)
        assert np.array_equal(values, expected)

    def test_negative_values_do_not_cancel(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        grid = np.zeros((9, 10))
        grid[0, 0] = 2.0
        grid[1, 0] = -5.0
        assert zone_relevance(grid, part)[0] == 2.0

    def test_out_of_bounds_partition(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        with pytest.raises(ParameterError):
            zone_relevance(np.ones((5, 10)), part)

    def test_total_never_exceeds_positive_mass(self):
        rng = np.random.default_rng(4)
        part = default_partition(((1, 8, 1, 4), (2, 9, 5, 9)))
        grid = rng.normal(size=(12, 12))
        values = zone_relevance(grid, part)
        assert values.min() >= 0.0
        assert values.sum() <= grid[grid > 0].sum() + 1e-12


class TestSpearman:
    def test_monotone(self):
        assert spearman([1, 2, 3], [10, 20, 30]) == 1.0

    def test_antitone(self):
        assert spearman([1, 2, 3], [30, 20, 10]) == -1.0

    def test_tied_average_ranks_coincide(self):
        # rank tables: x -> [1, 2.5, 2.5, 4], y -> [1, 2.5, 2.5, 4]
        assert spearman([1, 2, 2, 4], [3, 5, 5, 9]) == 1.0

    def test_constant_vector_is_undefined(self):
        assert spearman([1, 1, 1], [1, 2, 3]) is None
        assert spearman([1, 2, 3], [5, 5, 5]) is None

    def test_matches_scipy(self):
        import scipy.stats

        rng = np.random.default_rng(8)
        for _ in range(50):
            x = rng.integers(0, 5, size=12)
            y = rng.normal(size=12).round(1)
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            expected = scipy.stats.spearmanr(x, y).statistic
            assert spearman(x, y) == pytest.approx(expected, abs=1e-12)

    def test_increasing_transform_invariance(self):
        x = [0, 3, 1, 2, 2]
        y = [5.0, 1.0, 4.0, 2.0, 2.5]
        base = spearman(x, y)
        assert spearman(np.exp(x), y) == base
        assert spearman(x, [v * 100 + 3 for v in y]) == base

    def test_length_validation(self):
        with pytest.raises(ParameterError):
            spearman([1, 2], [1, 2])
        with pytest.raises(ParameterError):
            spearman([1, 2, 3], [1, 2])


def _record(identifier, partials, probability, relevance=None, part=None):
    part = part or default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
    if relevance is None:
        relevance = np.zeros((9, 10))
        for zone, score in zip(part.zones, partials):
            relevance[zone.row_start : zone.row_stop, zone.col_start : zone.col_stop] = score
    return StudyRecord(
        identifier=identifier,
        score=BrixiaScore(tuple(partials)),
        relevance=relevance,
        covid_probability=probability,
        partition=part,
    )


class TestStudyReport:
    def test_proportional_relevance_gives_perfect_correlations(self):
        records = [
            _record("r1", (1, 0, 0, 0, 0, 0), 0.603),
            _record("r2", (2, 2, 2, 1, 1, 1), 0.659),
            _record("r3", (3, 3, 2, 2, 2, 2), 0.735),
        ]
        report = study_report(records)
        assert all(r.rho == 1.0 for r in report.records)
        assert report.overall_rho == 1.0
        assert report.flagged == ()

    def test_identical_overall_scores_make_overall_rho_undefined(self):
        records = [
            _record("a", (1, 0, 0, 0, 0, 0), 0.2),
            _record("b", (0, 1, 0, 0, 0, 0), 0.4),
            _record("c", (0, 0, 1, 0, 0, 0), 0.6),
        ]
        assert study_report(records).overall_rho is None

    def test_mismatched_top_zone_is_flagged(self):
        part = default_partition(((0, 9, 0, 5), (0, 9, 5, 10)))
        relevance = np.zeros((9, 10))
        zone_f = part.zones[5]
        relevance[zone_f.row_start : zone_f.row_stop, zone_f.col_start : zone_f.col_stop] = 9.0
        records = [
            _record("odd", (3, 0, 0, 0, 0, 0), 0.3, relevance=relevance, part=part),
            _record("r2", (2, 2, 2, 1, 1, 1), 0.5),
            _record("r3", (3, 3, 2, 2, 2, 2), 0.7),
        ]
        report = study_report(records)
        assert report.flagged == ("odd",)
        assert report.records[0].top_zone_mismatch

    def test_positive_scaling_leaves_rho_unchanged(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            partials = tuple(int(v) for v in rng.integers(0, 4, size=6))
            relevance = rng.normal(size=(9, 10))
            base = _record("x", partials, 0.5, relevance=relevance)
            scaled = _record("x", partials, 0.5, relevance=relevance * 37.5)
            r1 = study_report([base, _record("p", (1, 2, 3, 0, 1, 2), 0.2), _record("q", (0, 1, 2, 3, 2, 1), 0.9)])
            r2 = study_report([scaled, _record("p", (1, 2, 3, 0, 1, 2), 0.2), _record("q", (0, 1, 2, 3, 2, 1), 0.9)])
            assert r1.records[0].rho == r2.records[0].rho

    def test_needs_three_records(self):
        with pytest.raises(ParameterError):
            study_report([_record("a", (1, 0, 0, 0, 0, 0), 0.5)])

    def test_probability_domain(self):
        with pytest.raises(ParameterError):
            _record("bad", (1, 0, 0, 0, 0, 0), 1.2)
