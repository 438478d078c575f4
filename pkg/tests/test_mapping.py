import csv
import io
import random

import pytest

from fluxbands.classify import classify_value
from fluxbands.errors import EmptyInput, IncompleteGrid
from fluxbands.mapping import (
    DEFAULT_PALETTE,
    build_map,
    cell_position,
    render_csv,
    render_svg,
    render_text,
)
from fluxbands.measurements import FluxReading, MeasurementPoint, Side


def device_points(device, side, values):
    return [
        MeasurementPoint(device, side, i, FluxReading.from_rms(v))
        for i, v in enumerate(values, start=1)
    ]


def random_maps(scheme, rng, n_devices=4):
    maps = []
    for d in range(n_devices):
        points = device_points(f"D{d}", Side.TOP, [round(rng.uniform(0, 1), 4) for _ in range(9)])
        points += device_points(f"D{d}", Side.BOTTOM, [round(rng.uniform(0, 1), 4) for _ in range(9)])
        maps.append(build_map(points, scheme))
    return maps


class TestCellPosition:
    def test_row_major_layout(self):
        assert cell_position(1) == (1, 1)
        assert cell_position(3) == (1, 3)
        assert cell_position(4) == (2, 1)
        assert cell_position(9) == (3, 3)


class TestBuildMap:
    def test_all_zero_readings_are_safest(self, reference_scheme):
        m = build_map(device_points("T1", Side.TOP, [0.0] * 9), reference_scheme)
        assert m.bottom is None
        assert all(c.class_id == 7 for c in m.top)
        assert not any(c.above_limit for c in m.top)

    def test_peak_cell_flagged(self, reference_scheme):
        values = [0.05] * 4 + [0.96] + [0.05] * 4
        m = build_map(device_points("T5", Side.BOTTOM, values), reference_scheme)
        cell = m.bottom[4]
        assert cell.grid_index == 5
        assert cell.class_id == 1
        assert cell.above_limit

    def test_limit_is_inclusive(self, reference_scheme):
        values = [0.05] * 8 + [0.20]
        m = build_map(device_points("T2", Side.BOTTOM, values), reference_scheme)
        assert m.bottom[8].above_limit
        assert m.bottom[8].class_id == 3

    def test_cells_match_classifier(self, reference_scheme):
        rng = random.Random(31)
        for m in random_maps(reference_scheme, rng):
            for side in m.present_sides():
                for c in m.cells(side):
                    assert c.class_id == classify_value(reference_scheme, side, c.value)
                    assert c.above_limit == (c.value >= reference_scheme.limit)

    def test_incomplete_grid(self, reference_scheme):
        with pytest.raises(IncompleteGrid) as exc:
            build_map(device_points("T1", Side.TOP, [0.1] * 8), reference_scheme)
        assert exc.value.missing == (9,)

    def test_mixed_devices_rejected(self, reference_scheme):
        points = device_points("T1", Side.TOP, [0.1] * 9) + device_points(
            "T2", Side.TOP, [0.1] * 9
        )
        with pytest.raises(ValueError):
            build_map(points, reference_scheme)

    def test_empty(self, reference_scheme):
        with pytest.raises(EmptyInput):
            build_map([], reference_scheme)


class TestRenderCsv:
    def test_schema_and_counts(self, reference_scheme):
        rng = random.Random(5)
        maps = random_maps(reference_scheme, rng, n_devices=3)
        rows = list(csv.reader(io.StringIO(render_csv(maps))))
        assert rows[0] == [
            "device_id", "side", "grid_index", "value_uT", "class_id",
            "class_label", "above_limit",
        ]
        assert len(rows) - 1 == sum(9 * len(m.present_sides()) for m in maps)

    def test_above_limit_row(self, reference_scheme):
        values = [0.05] * 8 + [0.20]
        m = build_map(device_points("T2", Side.BOTTOM, values), reference_scheme)
        rows = list(csv.reader(io.StringIO(render_csv([m]))))
        last = rows[-1]
        assert last == ["T2", "bottom", "9", "0.2000", "3", "Low dangerous", "true"]

    def test_six_devices_two_sides_gives_108_rows(self, reference_scheme):
        rng = random.Random(60)
        maps = random_maps(reference_scheme, rng, n_devices=6)
        rows = render_csv(maps).splitlines()
        assert len(rows) - 1 == 108

    def test_classes_recomputable_from_values(self, reference_scheme):
        rng = random.Random(13)
        maps = random_maps(reference_scheme, rng)
        for row in list(csv.reader(io.StringIO(render_csv(maps))))[1:]:
            side = Side(row[1])
            assert int(row[4]) == classify_value(reference_scheme, side, float(row[3]))

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            render_csv([])


class TestRenderText:
    def test_lists_every_cell(self, reference_scheme):
        m = build_map(device_points("T1", Side.TOP, [0.1] * 9), reference_scheme)
        out = render_text([m])
        assert "T1 / top" in out
        assert out.count("class 5") == 9

    def test_devices_sorted(self, reference_scheme):
        maps = [
            build_map(device_points("T2", Side.TOP, [0.1] * 9), reference_scheme),
            build_map(device_points("T1", Side.TOP, [0.1] * 9), reference_scheme),
        ]
        out = render_text(maps)
        assert out.index("T1 / top") < out.index("T2 / top")


class TestRenderSvg:
    def test_structure_single_grid(self, reference_scheme):
        m = build_map(device_points("T1", Side.TOP, [0.1] * 9), reference_scheme)
        svg = render_svg([m])
        assert svg.startswith("<?xml")
        assert svg.count('<g id="T1-top"') == 1
        assert svg.count("<g id=") == 2  # device grid + legend
        # 9 cells + background + 7 legend swatches
        assert svg.count("<rect") == 9 + 1 + 7
        for label in ("Highly dangerous", "Highly safe"):
            assert label in svg

    def test_group_ordering(self, reference_scheme):
        rng = random.Random(3)
        maps = random_maps(reference_scheme, rng, n_devices=2)
        svg = render_svg(maps)
        assert (
            svg.index('id="D0-top"')
            < svg.index('id="D0-bottom"')
            < svg.index('id="D1-top"')
        )

    def test_palette_and_emphasis(self, reference_scheme):
        values = [0.05] * 8 + [0.96]
        m = build_map(device_points("T1", Side.BOTTOM, values), reference_scheme)
        svg = render_svg([m])
        assert DEFAULT_PALETTE[1] in svg  # the 0.96 cell fill
        assert 'fill="#ff2d95">0.9600</text>' in svg

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            render_svg([])


class TestDeterminism:
    def test_repeat_renders_identical(self, reference_scheme):
        rng = random.Random(111)
        maps = random_maps(reference_scheme, rng)
        assert render_text(maps) == render_text(maps)
        assert render_csv(maps) == render_csv(maps)
        assert render_svg(maps) == render_svg(maps)
