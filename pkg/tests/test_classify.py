import random

import pytest

import fixture_data
from conftest import make_ranges
from fluxbands.classify import (
    CANONICAL_LABELS,
    ClassScheme,
    align_classes,
    classify_value,
    extend_ranges,
    extract_ranges,
    render_class_table,
)
from fluxbands.clustering import Clustering
from fluxbands.errors import (
    NonContiguousClusters,
    RoundingCollision,
    SideAbsent,
    UnsupportedK,
)
from fluxbands.measurements import Side


def make_clustering(values, assignments, centroids):
    return Clustering(
        values=tuple(values),
        assignments=tuple(assignments),
        centroids=tuple(centroids),
        objective=0.0,
        iterations_used=1,
        converged=True,
        run_seed=0,
    )


class TestExtractRanges:
    def test_single_cluster(self):
        c = make_clustering([0.3, 0.1, 0.2], [0, 0, 0], [0.2])
        (r,) = extract_ranges(c, Side.TOP)
        assert (r.raw_min, r.raw_max, r.rank) == (0.1, 0.3, 1)

    def test_ranks_descend(self):
        c = make_clustering([0.1, 0.9, 0.2, 0.8], [0, 1, 0, 1], [0.15, 0.85])
        ranges = extract_ranges(c, Side.BOTTOM)
        assert [r.rank for r in ranges] == [1, 2]
        assert ranges[0].raw_min == 0.8 and ranges[1].raw_max == 0.2

    def test_non_contiguous_rejected(self):
        c = make_clustering([0.1, 0.5, 0.9], [0, 1, 0], [0.5, 0.5])
        with pytest.raises(NonContiguousClusters):
            extract_ranges(c, Side.TOP)


class TestExtendRanges:
    def test_reference_top_boundaries(self):
        ranges = extend_ranges(make_ranges(Side.TOP, fixture_data.TOP_EXTREMA))
        got = [(r.ext_min, r.ext_max) for r in ranges]
        assert got == list(fixture_data.TOP_EXTENDED)
        assert ranges[0].open_top and not any(r.open_top for r in ranges[1:])

    def test_reference_bottom_boundaries(self):
        ranges = extend_ranges(make_ranges(Side.BOTTOM, fixture_data.BOTTOM_EXTREMA))
        assert [(r.ext_min, r.ext_max) for r in ranges] == list(fixture_data.BOTTOM_EXTENDED)

    def test_single_range(self):
        (r,) = extend_ranges(make_ranges(Side.TOP, [(0.0100, 0.0224)]))
        assert r.ext_min == 0.01 and r.ext_max is None and r.open_top

    def test_tiling_no_gaps(self):
        ranges = extend_ranges(make_ranges(Side.TOP, fixture_data.TOP_EXTREMA))
        for upper, lower in zip(ranges, ranges[1:]):
            assert round(upper.ext_min - lower.ext_max, 10) == 0.01

    def test_rounding_collision(self):
        with pytest.raises(RoundingCollision):
            extend_ranges(make_ranges(Side.TOP, [(0.052, 0.06), (0.048, 0.05)]))


class TestAlignClasses:
    def test_reference_scheme_is_canonical(self, reference_scheme):
        assert reference_scheme.canonical
        assert [c.label for c in reference_scheme.classes] == list(CANONICAL_LABELS)
        assert reference_scheme.dangerous_count == 3

    def test_reference_memberships(self, reference_scheme):
        top = extend_ranges(make_ranges(Side.TOP, fixture_data.TOP_EXTREMA))
        bottom = extend_ranges(make_ranges(Side.BOTTOM, fixture_data.BOTTOM_EXTREMA))
        by_rank = {
            ("top", r.rank): r for r in top
        } | {("bottom", r.rank): r for r in bottom}
        for class_id, members in fixture_data.CLASS_MEMBERSHIP.items():
            cls = reference_scheme.classes[class_id - 1]
            for side_name in ("top", "bottom"):
                interval = cls.top if side_name == "top" else cls.bottom
                if side_name in members:
                    r = by_rank[(side_name, members[side_name])]
                    assert interval is not None
                    assert interval.lo == r.ext_min
                    assert interval.hi == r.ext_max
                else:
                    assert interval is None

    def test_borderline_note_recorded(self, reference_scheme):
        # top rank 1 starts under the limit yet lands in class 1
        assert any("top rank-1" in note for note in reference_scheme.notes)

    def test_identical_sides_all_safe_middles(self):
        # rank 1 straddles the limit; every other range sits fully below it
        extrema = [(0.18, 0.60), (0.10, 0.15), (0.06, 0.08), (0.03, 0.05), (0.001, 0.02)]
        top = extend_ranges(make_ranges(Side.TOP, extrema))
        bottom = extend_ranges(make_ranges(Side.BOTTOM, extrema))
        scheme = align_classes(top, bottom, limit=0.2)
        assert scheme.canonical
        for class_id in (1, 4, 5, 6, 7):
            cls = scheme.classes[class_id - 1]
            assert cls.top is not None and cls.bottom is not None
        for class_id in (2, 3):
            cls = scheme.classes[class_id - 1]
            assert cls.top is None and cls.bottom is None

    def test_non_canonical_k_falls_back_to_generic(self):
        extrema = [(0.30, 0.60), (0.10, 0.15), (0.03, 0.05), (0.001, 0.02)]
        top = extend_ranges(make_ranges(Side.TOP, extrema))
        bottom = extend_ranges(make_ranges(Side.BOTTOM, extrema))
        scheme = align_classes(top, bottom, limit=0.2)
        assert not scheme.canonical
        assert scheme.classes[0].label == "D1"
        assert scheme.classes[-1].label.startswith("S")
        assert any("non-canonical" in n for n in scheme.notes)

    def test_require_canonical_raises(self):
        extrema = [(0.30, 0.60), (0.10, 0.15), (0.03, 0.05), (0.001, 0.02)]
        top = extend_ranges(make_ranges(Side.TOP, extrema))
        bottom = extend_ranges(make_ranges(Side.BOTTOM, extrema))
        with pytest.raises(UnsupportedK):
            align_classes(top, bottom, limit=0.2, require_canonical=True)

    def test_all_safe_rank1_is_generic(self):
        # every range below the limit: no dangerous class fits the canonical shape
        extrema = [(0.08, 0.09), (0.06, 0.07), (0.04, 0.05), (0.02, 0.03), (0.001, 0.01)]
        top = extend_ranges(make_ranges(Side.TOP, extrema))
        bottom = extend_ranges(make_ranges(Side.BOTTOM, extrema))
        scheme = align_classes(top, bottom, limit=0.2)
        assert not scheme.canonical
        assert scheme.dangerous_count == 0

    def test_requires_extended_ranges(self):
        raw = make_ranges(Side.TOP, fixture_data.TOP_EXTREMA)
        with pytest.raises(ValueError):
            align_classes(raw, raw, limit=0.2)

    def test_limit_consistency(self, reference_scheme):
        # dangerous classes span values at or above the limit, safe ones never do
        for cls in reference_scheme.classes:
            for interval in (cls.top, cls.bottom):
                if interval is None:
                    continue
                reaches_limit = interval.open_top or interval.hi >= reference_scheme.limit
                if cls.id <= reference_scheme.dangerous_count:
                    assert reaches_limit, cls
                else:
                    assert not reaches_limit, cls


class TestClassifyValue:
    @pytest.mark.parametrize("side_name,value,expected", fixture_data.PEAK_CASES)
    def test_reference_peaks(self, reference_scheme, side_name, value, expected):
        assert classify_value(reference_scheme, Side(side_name), value) == expected

    def test_grid_boundary_rounding(self, reference_scheme):
        assert classify_value(reference_scheme, Side.BOTTOM, 0.85) == 2
        assert classify_value(reference_scheme, Side.BOTTOM, 0.855) == 1
        assert classify_value(reference_scheme, Side.TOP, 0.195) == 1
        assert classify_value(reference_scheme, Side.TOP, 0.194) == 4

    def test_clamps_below_lowest(self, reference_scheme):
        assert classify_value(reference_scheme, Side.TOP, 0.0) == 7
        assert classify_value(reference_scheme, Side.BOTTOM, 0.004) == 7

    def test_rejects_negative(self, reference_scheme):
        with pytest.raises(ValueError):
            classify_value(reference_scheme, Side.TOP, -0.1)

    def test_side_absent(self, reference_scheme):
        one_sided = ClassScheme(
            limit=0.2,
            classes=tuple(
                type(c)(id=c.id, label=c.label, top=c.top, bottom=None)
                for c in reference_scheme.classes
            ),
            dangerous_count=3,
            canonical=False,
        )
        with pytest.raises(SideAbsent):
            classify_value(one_sided, Side.BOTTOM, 0.1)

    def test_order_preservation(self, reference_scheme):
        rng = random.Random(99)
        for _ in range(2000):
            side = rng.choice([Side.TOP, Side.BOTTOM])
            u = rng.uniform(0, 1.2)
            v = rng.uniform(0, 1.2)
            if u > v:
                u, v = v, u
            assert classify_value(reference_scheme, side, u) >= classify_value(
                reference_scheme, side, v
            )


class TestRenderClassTable:
    def test_reference_table_rows(self, reference_scheme):
        table = render_class_table(reference_scheme)
        lines = table.splitlines()
        assert len(lines) == 8  # header + 7 classes
        assert ">= 0.20 uT" in lines[1]
        assert "< 0.20 uT" in lines[4]
        assert "> 0.19" in lines[1] and "> 0.85" in lines[1]
        assert "0.29 - 0.85" in lines[2]
        assert "0.01 - 0.03" in lines[7] and "0.01 - 0.08" in lines[7]

    def test_deterministic(self, reference_scheme):
        assert render_class_table(reference_scheme) == render_class_table(reference_scheme)
