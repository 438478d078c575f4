from pathlib import Path

import pytest

from fluxbands.classify import EmissionRange, align_classes, extend_ranges
from fluxbands.measurements import Side

import fixture_data

REPO_ROOT = Path(__file__).resolve().parents[1]
SAMPLE_CSV = REPO_ROOT / "sample_data" / "tablets.csv"


@pytest.fixture(scope="session")
def sample_csv_path() -> Path:
    return SAMPLE_CSV


@pytest.fixture(scope="session")
def sample_csv_bytes() -> bytes:
    return SAMPLE_CSV.read_bytes()


def make_ranges(side: Side, extrema) -> list[EmissionRange]:
    """EmissionRanges straight from (raw_min, raw_max) pairs, rank 1 first."""
    return [
        EmissionRange(side=side, rank=rank, raw_min=lo, raw_max=hi)
        for rank, (lo, hi) in enumerate(extrema, start=1)
    ]


@pytest.fixture(scope="session")
def reference_scheme():
    """Canonical scheme built from the reference extrema, no clustering."""
    top = extend_ranges(make_ranges(Side.TOP, fixture_data.TOP_EXTREMA))
    bottom = extend_ranges(make_ranges(Side.BOTTOM, fixture_data.BOTTOM_EXTREMA))
    return align_classes(top, bottom, limit=0.2)
