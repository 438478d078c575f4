"""Exception types raised across the package.

Ingestion errors carry the 1-based data-row number of the offending CSV row
(row 0 means the header) so CLI messages can point at the exact line.
"""

from __future__ import annotations


class FluxbandsError(Exception):
    """Base class for every error this package raises on purpose."""


class RowError(FluxbandsError):
    """Base for per-row ingestion errors; ``row`` is 1-based, 0 = header."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}" if row else message)


class MalformedRow(RowError):
    """Wrong column count, bad token, or invalid header."""


class UnknownUnit(RowError):
    """Unit column is not one of uT / mG."""

    def __init__(self, row: int, unit: str):
        self.unit = unit
        super().__init__(row, f"unknown unit {unit!r} (expected uT or mG)")


class DuplicatePoint(RowError):
    """Same (device, side, grid_index) appears twice."""

    def __init__(self, row: int, device_id: str, side: str, grid_index: int):
        self.key = (device_id, side, grid_index)
        super().__init__(
            row, f"duplicate point ({device_id}, {side}, {grid_index})"
        )


class NegativeFlux(RowError):
    """A flux magnitude below zero."""

    def __init__(self, row: int, value: str):
        self.value = value
        super().__init__(row, f"negative flux density {value}")


class EmptyInput(FluxbandsError):
    """No measurement points / no maps to process."""


class IncompleteGrid(FluxbandsError):
    """A present (device, side) is missing grid points."""

    def __init__(self, device_id: str, side: str, missing: tuple[int, ...]):
        self.device_id = device_id
        self.side = side
        self.missing = missing
        super().__init__(
            f"device {device_id}, side {side}: missing grid index(es) "
            f"{', '.join(str(i) for i in missing)}"
        )


class TooFewDistinctValues(FluxbandsError):
    """Dataset has fewer distinct values than requested clusters."""

    def __init__(self, k: int, distinct: int):
        self.k = k
        self.distinct = distinct
        super().__init__(f"need at least k={k} distinct values, found {distinct}")


class KTooLarge(FluxbandsError):
    """Requested segment count exceeds the number of values."""


class DimensionMismatch(FluxbandsError):
    """Assignments, values, and centroids do not line up."""


class NonContiguousClusters(FluxbandsError):
    """Clusters are not contiguous blocks in sorted-value order."""


class RoundingCollision(FluxbandsError):
    """Two range minima fall on the same 0.01 grid value (k too large for
    the data resolution)."""


class UnsupportedK(FluxbandsError):
    """A canonical 7-class scheme was demanded for a non-canonical layout."""


class SideAbsent(FluxbandsError):
    """Classification scheme has no interval for the requested side."""
