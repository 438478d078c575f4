"""Per-device dangerousness maps and their text / CSV / SVG renderings.

A map holds one 3x3 cell grid per measured side of a device; every cell
carries the measured value, its class under a scheme, and an above-limit
flag. Renderers are pure functions of the maps and byte-deterministic:
identical input always yields identical output bytes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .classify import ClassScheme, classify_value
from .errors import DuplicatePoint, EmptyInput, IncompleteGrid
from .measurements import GRID_SIZE, MeasurementPoint, Side, rms

# class id -> cell fill, darkest red for class 1 down to green for the safest
DEFAULT_PALETTE = {
    1: "#a50026",
    2: "#d73027",
    3: "#f46d43",
    4: "#fdae61",
    5: "#fee08b",
    6: "#a6d96a",
    7: "#1a9850",
}
EMPHASIS_COLOR = "#ff2d95"  # above-limit values
_TEXT_DARK = "#111111"
_TEXT_LIGHT = "#ffffff"

_CELL = 64
_MARGIN = 16
_CAPTION_H = 18
_GRID_W = 3 * _CELL
_GRID_H = 3 * _CELL
_BLOCK_H = _CAPTION_H + _GRID_H + _MARGIN
_LEGEND_ROW_H = 20


def cell_position(grid_index: int) -> tuple[int, int]:
    """(row, column) of a grid index, both 1-based, row-major."""
    return (grid_index + 2) // 3, (grid_index - 1) % 3 + 1


@dataclass(frozen=True)
class MapCell:
    grid_index: int
    value: float
    class_id: int
    above_limit: bool

    def to_dict(self) -> dict:
        return {
            "grid_index": self.grid_index,
            "value": self.value,
            "class_id": self.class_id,
            "above_limit": self.above_limit,
        }


@dataclass(frozen=True)
class DangerMap:
    """One device's classified grid, per side, plus the scheme used."""

    device_id: str
    top: tuple[MapCell, ...] | None
    bottom: tuple[MapCell, ...] | None
    scheme: ClassScheme

    def cells(self, side: Side) -> tuple[MapCell, ...] | None:
        return self.top if side is Side.TOP else self.bottom

    def present_sides(self) -> list[Side]:
        return [side for side in Side if self.cells(side) is not None]

    def to_dict(self) -> dict:
        return {
            "device_id": self.device_id,
            "sides": {
                side.value: [c.to_dict() for c in self.cells(side)]
                for side in self.present_sides()
            },
        }


def build_map(points: Sequence[MeasurementPoint], scheme: ClassScheme) -> DangerMap:
    """Classify one device's points into a danger map.

    Every side that appears must have all 9 grid points.
    """
    if not points:
        raise EmptyInput("no points for map")
    device_ids = {p.device_id for p in points}
    if len(device_ids) != 1:
        raise ValueError(f"points span several devices: {sorted(device_ids)}")
    device_id = points[0].device_id

    grids: dict[Side, tuple[MapCell, ...] | None] = {Side.TOP: None, Side.BOTTOM: None}
    for side in Side:
        side_points = {}
        for p in points:
            if p.side is not side:
                continue
            if p.grid_index in side_points:
                raise DuplicatePoint(0, device_id, side.value, p.grid_index)
            side_points[p.grid_index] = p
        if not side_points:
            continue
        missing = tuple(i for i in range(1, GRID_SIZE + 1) if i not in side_points)
        if missing:
            raise IncompleteGrid(device_id, side.value, missing)
        cells = []
        for i in range(1, GRID_SIZE + 1):
            value = rms(side_points[i].reading)
            cells.append(
                MapCell(
                    grid_index=i,
                    value=value,
                    class_id=classify_value(scheme, side, value),
                    above_limit=value >= scheme.limit,
                )
            )
        grids[side] = tuple(cells)
    return DangerMap(
        device_id=device_id, top=grids[Side.TOP], bottom=grids[Side.BOTTOM],
        scheme=scheme,
    )


def _ordered(maps: Sequence[DangerMap]) -> list[DangerMap]:
    if not maps:
        raise EmptyInput("no maps to render")
    return sorted(maps, key=lambda m: m.device_id)


def _label(scheme: ClassScheme, class_id: int) -> str:
    return scheme.classes[class_id - 1].label


def render_text(maps: Sequence[DangerMap]) -> str:
    """Plain-text report: a 3x3 value grid and a cell listing per side."""
    out = []
    for m in _ordered(maps):
        for side in m.present_sides():
            cells = m.cells(side)
            out.append(f"== {m.device_id} / {side} ==")
            for row in range(3):
                out.append(
                    "  "
                    + "  ".join(
                        f"{c.value:8.4f}{'*' if c.above_limit else ' '}"
                        for c in cells[row * 3 : row * 3 + 3]
                    ).rstrip()
                )
            for c in cells:
                flag = "  >= limit" if c.above_limit else ""
                out.append(
                    f"  {c.grid_index}  {c.value:.4f} uT  class {c.class_id}"
                    f"  {_label(m.scheme, c.class_id)}{flag}"
                )
            out.append("")
    out.append("* value at or above the reference limit")
    return "\n".join(out) + "\n"


def render_csv(maps: Sequence[DangerMap]) -> str:
    """CSV report, one row per cell:
    device_id,side,grid_index,value_uT,class_id,class_label,above_limit
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["device_id", "side", "grid_index", "value_uT", "class_id", "class_label", "above_limit"]
    )
    for m in _ordered(maps):
        for side in m.present_sides():
            for c in m.cells(side):
                writer.writerow(
                    [
                        m.device_id,
                        side.value,
                        c.grid_index,
                        f"{c.value:.4f}",
                        c.class_id,
                        _label(m.scheme, c.class_id),
                        "true" if c.above_limit else "false",
                    ]
                )
    return buf.getvalue()


def _fill(palette: dict[int, str], class_id: int) -> str:
    # generic schemes can exceed the 7 palette slots
    return palette.get(class_id, "#cccccc")


def _svg_text(x: int, y: int, content: str, fill: str, size: int = 12,
              anchor: str = "middle", weight: str | None = None) -> str:
    w = f' font-weight="{weight}"' if weight else ""
    return (
        f'<text x="{x}" y="{y}" text-anchor="{anchor}" '
        f'font-family="monospace" font-size="{size}" fill="{fill}"{w}>{content}</text>'
    )


def render_svg(
    maps: Sequence[DangerMap], palette: dict[int, str] | None = None
) -> str:
    """SVG document: one 3x3 grid per device side plus a class legend.

    Element order is stable (device lexical, top before bottom, grid index
    ascending), cell fills come from the palette, and above-limit values are
    printed in the emphasis color.
    """
    ordered = _ordered(maps)
    palette = palette or DEFAULT_PALETTE
    scheme = ordered[0].scheme

    n_rows = len(ordered)
    legend_h = len(scheme.classes) * _LEGEND_ROW_H + _MARGIN
    width = _MARGIN + len(Side) * (_GRID_W + _MARGIN)
    height = _MARGIN + n_rows * _BLOCK_H + legend_h

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for row, m in enumerate(ordered):
        block_y = _MARGIN + row * _BLOCK_H
        for col, side in enumerate(Side):
            cells = m.cells(side)
            if cells is None:
                continue
            x0 = _MARGIN + col * (_GRID_W + _MARGIN)
            lines.append(f'<g id="{m.device_id}-{side.value}">')
            lines.append(
                _svg_text(x0, block_y + _CAPTION_H - 6, f"{m.device_id} {side.value}",
                          _TEXT_DARK, size=13, anchor="start", weight="bold")
            )
            for c in cells:
                r, col_idx = cell_position(c.grid_index)
                cx = x0 + (col_idx - 1) * _CELL
                cy = block_y + _CAPTION_H + (r - 1) * _CELL
                lines.append(
                    f'<rect x="{cx}" y="{cy}" width="{_CELL}" height="{_CELL}" '
                    f'fill="{_fill(palette, c.class_id)}" stroke="#333333"/>'
                )
                if c.above_limit:
                    value_fill = EMPHASIS_COLOR
                elif c.class_id <= max(1, scheme.dangerous_count):
                    value_fill = _TEXT_LIGHT
                else:
                    value_fill = _TEXT_DARK
                lines.append(
                    _svg_text(cx + _CELL // 2, cy + _CELL // 2 + 4,
                              f"{c.value:.4f}", value_fill)
                )
            lines.append("</g>")

    legend_y = _MARGIN + n_rows * _BLOCK_H
    lines.append('<g id="legend">')
    for i, cls in enumerate(scheme.classes):
        y = legend_y + i * _LEGEND_ROW_H
        lines.append(
            f'<rect x="{_MARGIN}" y="{y}" width="14" height="14" '
            f'fill="{_fill(palette, cls.id)}" stroke="#333333"/>'
        )
        lines.append(
            _svg_text(_MARGIN + 22, y + 12, f"{cls.id}  {cls.label}",
                      _TEXT_DARK, anchor="start")
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
