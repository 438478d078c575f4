"""Turn clusterings into ordered emission ranges and a unified dangerousness
scheme against a reference exposure limit.

Raw cluster extrema become display ranges on a 0.01 uT grid: every range's
lower bound is rounded half-up to two decimals, and each range's upper bound
is stretched to sit one grid step under the next range's lower bound, so the
bands tile the axis with no gaps. The highest band is open-ended.

Band danger is judged against the limit (default 0.2 uT): the top band is
dangerous when its measured maximum reaches the limit, a middle band when
its extended interval reaches it. With five bands per side and one to three
leading dangerous bands, the two sides align into the canonical seven-label
scheme; any other layout falls back to generic D*/S* labels.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal, ROUND_HALF_UP
from typing import Sequence

from .clustering import Clustering
from .errors import (
    NonContiguousClusters,
    RoundingCollision,
    SideAbsent,
    UnsupportedK,
)
from .measurements import Side

GRID_DECIMALS = 2
DEFAULT_LIMIT_UT = 0.2
CANONICAL_K = 5

CANONICAL_LABELS = (
    "Highly dangerous",
    "Middle dangerous",
    "Low dangerous",
    "Low safe",
    "Low medium safe",
    "Medium safe",
    "Highly safe",
)


def _cents(value: float) -> int:
    """Value as an integer count of 0.01 uT grid steps, rounded half-up."""
    quantum = Decimal(1).scaleb(-GRID_DECIMALS)
    return int(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP).scaleb(GRID_DECIMALS))


def _from_cents(cents: int) -> float:
    return cents / 100.0


@dataclass(frozen=True)
class EmissionRange:
    """A cluster's [min, max] emission interval for one side.

    Rank 1 is the highest range. ``ext_min``/``ext_max`` are the extended
    display bounds on the 0.01 grid, filled in by :func:`extend_ranges`;
    the rank-1 range is open-ended above (``ext_max`` stays None).
    """

    side: Side
    rank: int
    raw_min: float
    raw_max: float
    ext_min: float | None = None
    ext_max: float | None = None
    open_top: bool = False

    def __post_init__(self) -> None:
        if self.raw_min > self.raw_max:
            raise ValueError(f"raw_min {self.raw_min} > raw_max {self.raw_max}")

    @property
    def extended(self) -> bool:
        return self.ext_min is not None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "raw_min": self.raw_min,
            "raw_max": self.raw_max,
            "ext_min": self.ext_min,
            "ext_max": self.ext_max,
            "open_top": self.open_top,
        }


def extract_ranges(clustering: Clustering, side: Side) -> list[EmissionRange]:
    """One range per cluster, rank 1 holding the highest values.

    The clustering must be contiguous in sorted-value order (always true
    after convergence); this is re-checked defensively.
    """
    order = sorted(range(len(clustering.values)), key=lambda i: clustering.values[i])
    seen_done: set[int] = set()
    current = None
    for i in order:
        label = clustering.assignments[i]
        if label != current:
            if label in seen_done:
                raise NonContiguousClusters(f"cluster {label} splits in sorted order")
            if current is not None:
                seen_done.add(current)
            current = label
    extrema = sorted(
        (
            (min(clustering.cluster_values(c)), max(clustering.cluster_values(c)))
            for c in range(clustering.k)
        ),
        key=lambda mm: mm[0],
        reverse=True,
    )
    for (hi_min, _), (lo_min, lo_max) in zip(extrema, extrema[1:]):
        if hi_min <= lo_max:
            raise NonContiguousClusters(
                f"ranges overlap: min {hi_min} <= neighbouring max {lo_max}"
            )
    return [
        EmissionRange(side=side, rank=rank, raw_min=mn, raw_max=mx)
        for rank, (mn, mx) in enumerate(extrema, start=1)
    ]


def extend_ranges(ranges: Sequence[EmissionRange]) -> list[EmissionRange]:
    """Fill in the extended display bounds on the 0.01 uT grid.

    ext_min is the range's raw_min rounded half-up; each range's ext_max is
    the next-higher range's ext_min minus one grid step; rank 1 is open
    above. Raises RoundingCollision when two ranges round onto the same
    grid value.
    """
    ordered = sorted(ranges, key=lambda r: r.rank)
    if [r.rank for r in ordered] != list(range(1, len(ordered) + 1)):
        raise ValueError("ranges must carry ranks 1..k")
    mins = [_cents(r.raw_min) for r in ordered]
    for higher, lower in zip(mins, mins[1:]):
        if higher <= lower:
            raise RoundingCollision(
                f"range minima {_from_cents(lower)} and {_from_cents(higher)} "
                "collide on the 0.01 grid"
            )
    extended = []
    for pos, r in enumerate(ordered):
        if pos == 0:
            extended.append(
                replace(r, ext_min=_from_cents(mins[0]), ext_max=None, open_top=True)
            )
        else:
            extended.append(
                replace(
                    r,
                    ext_min=_from_cents(mins[pos]),
                    ext_max=_from_cents(mins[pos - 1] - 1),
                    open_top=False,
                )
            )
    return extended


@dataclass(frozen=True)
class ClassInterval:
    """One side's extended interval inside a danger class; ``hi`` is None
    for the open-ended top interval."""

    lo: float
    hi: float | None

    @property
    def open_top(self) -> bool:
        return self.hi is None

    @property
    def display_threshold(self) -> float:
        """Exclusive lower bound shown for an open interval ("> x")."""
        return _from_cents(_cents(self.lo) - 1)

    def to_json(self):
        if self.open_top:
            return {"gt": self.display_threshold}
        return [self.lo, self.hi]


@dataclass(frozen=True)
class DangerClass:
    id: int
    label: str
    top: ClassInterval | None
    bottom: ClassInterval | None

    def interval(self, side: Side) -> ClassInterval | None:
        return self.top if side is Side.TOP else self.bottom


@dataclass(frozen=True)
class ClassScheme:
    """Ordered danger classes mapping any (side, value) to a class id.

    ``dangerous_count`` classes sit above the limit banner; ``canonical``
    marks the seven-label layout. ``notes`` records borderline judgements,
    e.g. a top band kept dangerous although its measured minimum dips under
    the limit.
    """

    limit: float
    classes: tuple[DangerClass, ...]
    dangerous_count: int
    canonical: bool
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "canonical": self.canonical,
            "notes": list(self.notes),
            "classes": [
                {
                    "id": c.id,
                    "label": c.label,
                    "top": c.top.to_json() if c.top else None,
                    "bottom": c.bottom.to_json() if c.bottom else None,
                }
                for c in self.classes
            ],
        }


def _interval(r: EmissionRange) -> ClassInterval:
    return ClassInterval(lo=r.ext_min, hi=None if r.open_top else r.ext_max)


def _dangerous_prefix(ranges: list[EmissionRange], limit: float) -> int:
    """How many leading ranges count as dangerous.

    Rank 1 is dangerous when its measured maximum reaches the limit; lower
    ranges when their extended interval reaches it. Because ranges are
    ordered, the dangerous ones always form a prefix.
    """
    limit_cents = _cents(limit)
    flags = []
    for r in ranges:
        if r.rank == 1:
            flags.append(r.raw_max >= limit)
        else:
            flags.append(_cents(r.ext_max) >= limit_cents)
    count = 0
    for flag in flags:
        if not flag:
            break
        count += 1
    if any(flags[count:]):
        raise ValueError("dangerous ranges must form a prefix of the ranks")
    return count


def align_classes(
    top_ranges: Sequence[EmissionRange],
    bottom_ranges: Sequence[EmissionRange],
    limit: float = DEFAULT_LIMIT_UT,
    require_canonical: bool = False,
) -> ClassScheme:
    """Align both sides' extended ranges into one classification scheme.

    Canonical layout (5 ranges per side, 1-3 leading dangerous ranges each):
    rank 1 goes to class 1, dangerous middles fill classes 2-3, safe middles
    fill classes 4-6, rank 5 goes to class 7. Other layouts produce generic
    D*/S* labels unless ``require_canonical`` is set, in which case
    UnsupportedK is raised.
    """
    sides = {Side.TOP: sorted(top_ranges, key=lambda r: r.rank),
             Side.BOTTOM: sorted(bottom_ranges, key=lambda r: r.rank)}
    for side, ranges in sides.items():
        if not ranges:
            raise ValueError(f"no ranges for side {side}")
        if not all(r.extended for r in ranges):
            raise ValueError(f"side {side} ranges must be extended first")

    danger = {side: _dangerous_prefix(ranges, limit) for side, ranges in sides.items()}
    canonical = all(len(r) == CANONICAL_K for r in sides.values()) and all(
        1 <= d <= 3 for d in danger.values()
    )
    if require_canonical and not canonical:
        raise UnsupportedK(
            "canonical 7-class labels need 5 ranges per side with 1-3 "
            f"dangerous; got k={[len(r) for r in sides.values()]}, "
            f"dangerous={list(danger.values())}"
        )

    notes = []
    for side, ranges in sides.items():
        d = danger[side]
        if d >= 1 and ranges[0].raw_min < limit:
            notes.append(
                f"{side} rank-1 range starts below the limit "
                f"({ranges[0].raw_min:.4f} < {limit:g} uT) but contains "
                "above-limit values; kept in the most dangerous class"
            )

    if canonical:
        n_classes, n_dangerous = 7, 3
        labels = CANONICAL_LABELS
    else:
        n_dangerous = max(danger.values())
        n_safe = max(len(r) - d for r, d in ((sides[s], danger[s]) for s in Side))
        n_classes = n_dangerous + n_safe
        labels = tuple(f"D{i}" for i in range(1, n_dangerous + 1)) + tuple(
            f"S{i}" for i in range(1, n_safe + 1)
        )
        notes.append(
            "non-canonical layout: generic band labels in place of the "
            "seven-level vocabulary"
        )

    placement: dict[Side, dict[int, EmissionRange]] = {}
    for side, ranges in sides.items():
        d = danger[side]
        k = len(ranges)
        ids: dict[int, EmissionRange] = {}
        if canonical:
            for r in ranges:
                if r.rank <= d:
                    ids[r.rank] = r  # class 1 then dangerous middles at 2..d
                elif r.rank == k:
                    ids[7] = r
                else:
                    ids[r.rank - d + 3] = r  # safe middles start at class 4
        else:
            for r in ranges:
                if r.rank <= d:
                    ids[r.rank] = r
                elif r.rank == k:
                    ids[n_classes] = r
                else:
                    ids[n_dangerous + (r.rank - d)] = r
        placement[side] = ids

    classes = tuple(
        DangerClass(
            id=i,
            label=labels[i - 1],
            top=_interval(placement[Side.TOP][i]) if i in placement[Side.TOP] else None,
            bottom=_interval(placement[Side.BOTTOM][i]) if i in placement[Side.BOTTOM] else None,
        )
        for i in range(1, n_classes + 1)
    )
    return ClassScheme(
        limit=limit,
        classes=classes,
        dangerous_count=n_dangerous,
        canonical=canonical,
        notes=tuple(notes),
    )


def classify_value(scheme: ClassScheme, side: Side, value: float) -> int:
    """Class id for a value on one side.

    The value is rounded half-up onto the 0.01 grid; anything above the open
    top maps to the most dangerous class, anything under the lowest band
    clamps to the safest class that has an interval for this side.
    """
    if value < 0:
        raise ValueError(f"flux density must be >= 0, got {value}")
    present = [(c.id, c.interval(side)) for c in scheme.classes if c.interval(side)]
    if not present:
        raise SideAbsent(f"scheme has no {side} intervals")
    v = _cents(value)
    for class_id, interval in present:  # descending value order
        if v >= _cents(interval.lo):
            return class_id
    return present[-1][0]


def render_class_table(scheme: ClassScheme) -> str:
    """Fixed-width text table of the scheme, one row per class."""

    def fmt(interval: ClassInterval | None) -> str:
        if interval is None:
            return "-"
        if interval.open_top:
            return f"> {interval.display_threshold:.2f}"
        return f"{interval.lo:.2f} - {interval.hi:.2f}"

    rows = [
        (str(c.id), c.label, fmt(c.top), fmt(c.bottom)) for c in scheme.classes
    ]
    header = ("class", "label", "top", "bottom")
    widths = [
        max(len(header[col]), *(len(r[col]) for r in rows)) for col in range(4)
    ]
    banner_hot = f">= {scheme.limit:.2f} uT"
    banner_cold = f"< {scheme.limit:.2f} uT"
    banner_width = max(len(banner_hot), len(banner_cold))

    lines = [
        " " * (banner_width + 2)
        + "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()
    ]
    for idx, row in enumerate(rows):
        class_id = idx + 1
        if class_id == 1 and scheme.dangerous_count > 0:
            banner = banner_hot
        elif class_id == scheme.dangerous_count + 1:
            banner = banner_cold
        else:
            banner = ""
        lines.append(
            banner.ljust(banner_width + 2)
            + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        )
    return "\n".join(lines) + "\n"
