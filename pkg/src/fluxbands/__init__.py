"""Cluster grid-based magnetic flux measurements into emission ranges,
classify them against a reference exposure limit, and render per-device
dangerousness maps."""

from .classify import (
    CANONICAL_LABELS,
    DEFAULT_LIMIT_UT,
    ClassInterval,
    ClassScheme,
    DangerClass,
    EmissionRange,
    align_classes,
    classify_value,
    extend_ranges,
    extract_ranges,
    render_class_table,
)
from .clustering import (
    ClusterParams,
    Clustering,
    best_of_restarts,
    exact_dp,
    kmedians_run,
    objective,
)
from .errors import FluxbandsError
from .mapping import (
    DEFAULT_PALETTE,
    DangerMap,
    MapCell,
    build_map,
    render_csv,
    render_svg,
    render_text,
)
from .measurements import (
    FeatureDataset,
    FluxReading,
    MeasurementPoint,
    Side,
    build_datasets,
    parse_measurements,
    rms,
    round_half_up,
)

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_LABELS",
    "DEFAULT_LIMIT_UT",
    "DEFAULT_PALETTE",
    "ClassInterval",
    "ClassScheme",
    "ClusterParams",
    "Clustering",
    "DangerClass",
    "DangerMap",
    "EmissionRange",
    "FeatureDataset",
    "FluxReading",
    "FluxbandsError",
    "MapCell",
    "MeasurementPoint",
    "Side",
    "align_classes",
    "best_of_restarts",
    "build_datasets",
    "build_map",
    "classify_value",
    "exact_dp",
    "extend_ranges",
    "extract_ranges",
    "kmedians_run",
    "objective",
    "parse_measurements",
    "render_class_table",
    "render_csv",
    "render_svg",
    "render_text",
    "rms",
    "round_half_up",
]
