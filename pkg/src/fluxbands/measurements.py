"""Measurement domain types, CSV ingestion, and RMS feature extraction.

All flux densities are microtesla internally; milligauss input is converted
on ingestion (1 mG = 0.1 uT). Parsed magnitudes are fixed to four decimal
places, decimal-faithfully, so file round-trips never pick up binary-float
noise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from enum import Enum
from typing import NamedTuple, Sequence

from .errors import (
    DuplicatePoint,
    EmptyInput,
    IncompleteGrid,
    MalformedRow,
    NegativeFlux,
    UnknownUnit,
)

GRID_SIZE = 9
IO_DECIMALS = 4

VALUE_HEADER = ("device_id", "side", "grid_index", "unit", "value")
COMPONENT_HEADER = ("device_id", "side", "grid_index", "unit", "bx", "by", "bz")

_MICROTESLA_PER_MILLIGAUSS = Decimal("0.1")


class Side(Enum):
    """Device surface a measuring point belongs to."""

    TOP = "top"
    BOTTOM = "bottom"

    def __str__(self) -> str:
        return self.value


def round_half_up(value: float, places: int = IO_DECIMALS) -> float:
    """Round ``value`` to ``places`` decimals, ties away from zero.

    The float is interpreted through its shortest decimal repr, so a value
    that was parsed from "0.195" rounds like the literal 0.195 would, not
    like its binary approximation.
    """
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class FluxReading:
    """One grid point's flux density reading in uT.

    Carries either the three axis components or a single pre-computed RMS
    value, never both. Magnitudes must be finite and non-negative.
    """

    bx: float | None = None
    by: float | None = None
    bz: float | None = None
    rms_direct: float | None = None

    def __post_init__(self) -> None:
        components = (self.bx, self.by, self.bz)
        has_components = any(c is not None for c in components)
        if has_components and None in components:
            raise ValueError("bx, by, bz must be given together")
        if has_components == (self.rms_direct is not None):
            raise ValueError("exactly one of components or rms_direct required")
        for magnitude in (*components, self.rms_direct):
            if magnitude is None:
                continue
            if not math.isfinite(magnitude):
                raise ValueError(f"non-finite flux density {magnitude!r}")
            if magnitude < 0:
                raise ValueError(f"negative flux density {magnitude!r}")

    @classmethod
    def from_components(cls, bx: float, by: float, bz: float) -> "FluxReading":
        return cls(bx=bx, by=by, bz=bz)

    @classmethod
    def from_rms(cls, value: float) -> "FluxReading":
        return cls(rms_direct=value)


def rms(reading: FluxReading) -> float:
    """Scalar flux density of a reading: the direct value when present,
    otherwise the euclidean norm of the three components.

    Components are squared in sorted order so the result is exactly
    permutation-invariant.
    """
    if reading.rms_direct is not None:
        return reading.rms_direct
    a, b, c = sorted((reading.bx, reading.by, reading.bz))
    return math.sqrt(a * a + b * b + c * c)


@dataclass(frozen=True)
class MeasurementPoint:
    """One reading at a (device, side, grid cell) position."""

    device_id: str
    side: Side
    grid_index: int
    reading: FluxReading

    def __post_init__(self) -> None:
        if not self.device_id:
            raise ValueError("device_id must be non-empty")
        if not 1 <= self.grid_index <= GRID_SIZE:
            raise ValueError(f"grid_index {self.grid_index} outside 1..{GRID_SIZE}")


class Feature(NamedTuple):
    point: MeasurementPoint
    value: float


@dataclass(frozen=True)
class FeatureDataset:
    """One side's flat feature set: the RMS value of every grid point,
    ordered by (device_id, grid_index)."""

    side: Side
    features: tuple[Feature, ...]
    device_count: int

    def __post_init__(self) -> None:
        if len(self.features) != GRID_SIZE * self.device_count:
            raise ValueError(
                f"{len(self.features)} features for {self.device_count} devices; "
                f"expected {GRID_SIZE} per device"
            )

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(f.value for f in self.features)

    def __len__(self) -> int:
        return len(self.features)


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source.lstrip("﻿")
    data = source.read()
    return _read_text(data)


def _parse_magnitude(token: str, row: int, unit_scale: Decimal) -> float:
    try:
        value = Decimal(token.strip())
    except InvalidOperation:
        raise MalformedRow(row, f"not a number: {token!r}") from None
    if not value.is_finite():
        raise MalformedRow(row, f"non-finite value: {token!r}")
    if value < 0:
        raise NegativeFlux(row, token.strip())
    quantum = Decimal(1).scaleb(-IO_DECIMALS)
    return float((value * unit_scale).quantize(quantum, rounding=ROUND_HALF_UP))


def parse_measurements(source) -> list[MeasurementPoint]:
    """Parse measurement CSV into points.

    ``source`` may be bytes, a string, or a file object. The header must be
    ``device_id,side,grid_index,unit,value`` or
    ``device_id,side,grid_index,unit,bx,by,bz``; data rows of either shape
    (5 or 7 columns) may appear in the same file. ``side`` is top/bottom
    (any case), ``unit`` is uT or mG. Row numbers in errors are 1-based
    over data rows.
    """
    reader = csv.reader(io.StringIO(_read_text(source)))
    rows = list(reader)
    if not rows:
        raise MalformedRow(0, "missing header")
    header = tuple(cell.strip().lower() for cell in rows[0])
    if header not in (VALUE_HEADER, COMPONENT_HEADER):
        raise MalformedRow(0, f"unrecognized header {','.join(rows[0])!r}")

    points: list[MeasurementPoint] = []
    seen: set[tuple[str, Side, int]] = set()
    for row_num, cells in enumerate(rows[1:], start=1):
        if not cells:
            continue
        if len(cells) not in (5, 7):
            raise MalformedRow(row_num, f"expected 5 or 7 columns, got {len(cells)}")
        device_id = cells[0].strip()
        if not device_id:
            raise MalformedRow(row_num, "empty device_id")
        side_token = cells[1].strip().lower()
        try:
            side = Side(side_token)
        except ValueError:
            raise MalformedRow(row_num, f"invalid side {cells[1].strip()!r}") from None
        try:
            grid_index = int(cells[2].strip())
        except ValueError:
            raise MalformedRow(row_num, f"invalid grid_index {cells[2].strip()!r}") from None
        if not 1 <= grid_index <= GRID_SIZE:
            raise MalformedRow(row_num, f"grid_index {grid_index} outside 1..{GRID_SIZE}")
        unit = cells[3].strip().lower()
        if unit == "ut":
            scale = Decimal(1)
        elif unit == "mg":
            scale = _MICROTESLA_PER_MILLIGAUSS
        else:
            raise UnknownUnit(row_num, cells[3].strip())

        if len(cells) == 5:
            reading = FluxReading.from_rms(_parse_magnitude(cells[4], row_num, scale))
        else:
            bx, by, bz = (_parse_magnitude(c, row_num, scale) for c in cells[4:7])
            reading = FluxReading.from_components(bx, by, bz)

        key = (device_id, side, grid_index)
        if key in seen:
            raise DuplicatePoint(row_num, device_id, side.value, grid_index)
        seen.add(key)
        points.append(MeasurementPoint(device_id, side, grid_index, reading))
    return points


def build_datasets(
    points: Sequence[MeasurementPoint],
) -> tuple[FeatureDataset, FeatureDataset]:
    """Partition points by side into (top, bottom) feature datasets.

    Every (device, side) that appears must have all 9 grid indices; feature
    order is device_id lexical, then grid_index ascending.
    """
    if not points:
        raise EmptyInput("no measurement points")

    by_group: dict[tuple[str, Side], dict[int, MeasurementPoint]] = {}
    for point in points:
        group = by_group.setdefault((point.device_id, point.side), {})
        if point.grid_index in group:
            raise DuplicatePoint(0, point.device_id, point.side.value, point.grid_index)
        group[point.grid_index] = point

    for (device_id, side), group in sorted(by_group.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        missing = tuple(i for i in range(1, GRID_SIZE + 1) if i not in group)
        if missing:
            raise IncompleteGrid(device_id, side.value, missing)

    datasets = []
    for side in Side:
        devices = sorted(dev for dev, s in by_group if s is side)
        features = tuple(
            Feature(point, rms(point.reading))
            for dev in devices
            for point in (by_group[(dev, side)][i] for i in range(1, GRID_SIZE + 1))
        )
        datasets.append(FeatureDataset(side=side, features=features, device_count=len(devices)))
    return datasets[0], datasets[1]
