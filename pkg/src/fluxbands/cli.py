"""Command-line front end: ingest measurement CSVs, cluster each side,
classify the ranges, and write range/scheme/map artifacts.

Exit codes: 0 success, 1 input or validation error, 2 clustering
infeasible, 3 output I/O failure. All artifacts are byte-deterministic for
a fixed (input, configuration) pair; the effective configuration is echoed
into every JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .classify import (
    DEFAULT_LIMIT_UT,
    align_classes,
    extend_ranges,
    extract_ranges,
    render_class_table,
)
from .clustering import ClusterParams, best_of_restarts
from .errors import (
    EmptyInput,
    FluxbandsError,
    RoundingCollision,
    RowError,
    TooFewDistinctValues,
)
from .mapping import build_map, render_csv, render_svg, render_text
from .measurements import GRID_SIZE, Side, build_datasets, parse_measurements

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_OUTPUT = 3

FORMATS = ("text", "csv", "svg", "json")


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple[Path, ...]
    out_dir: Path
    k: int = 5
    restarts: int = 50
    seed: int = 0
    limit: float = DEFAULT_LIMIT_UT
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.limit <= 0:
            raise ValueError("limit must be positive")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ValueError(f"unknown formats: {sorted(unknown)}")

    def echo(self) -> dict:
        return {"k": self.k, "restarts": self.restarts, "seed": self.seed,
                "limit": self.limit}


def _load_points(paths: tuple[Path, ...]):
    points = []
    seen: dict[tuple, Path] = {}
    for path in paths:
        try:
            file_points = parse_measurements(path.read_bytes())
        except RowError as err:
            raise FluxbandsError(f"{path}: {err}") from err
        except OSError as err:
            raise FluxbandsError(f"{path}: {err.strerror or err}") from err
        for p in file_points:
            key = (p.device_id, p.side, p.grid_index)
            if key in seen:
                raise FluxbandsError(
                    f"{path}: point ({p.device_id}, {p.side}, {p.grid_index}) "
                    f"already defined in {seen[key]}"
                )
            seen[key] = path
        points.extend(file_points)
    return points


def _write(path: Path, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def _json_dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_analyze(config: RunConfig) -> int:
    try:
        points = _load_points(config.inputs)
        top, bottom = build_datasets(points)
    except FluxbandsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT

    params = ClusterParams(k=config.k, restarts=config.restarts, seed=config.seed)
    results = {}
    try:
        for dataset in (top, bottom):
            clustering = best_of_restarts(dataset, params)
            ranges = extend_ranges(extract_ranges(clustering, dataset.side))
            results[dataset.side] = (clustering, ranges)
    except (TooFewDistinctValues, RoundingCollision) as err:
        print(f"error: clustering infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE

    scheme = align_classes(
        results[Side.TOP][1], results[Side.BOTTOM][1], limit=config.limit
    )
    by_device: dict[str, list] = {}
    for p in points:
        by_device.setdefault(p.device_id, []).append(p)
    maps = [build_map(by_device[d], scheme) for d in sorted(by_device)]

    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for side in Side:
            clustering, ranges = results[side]
            payload = {
                "config": config.echo(),
                "side": side.value,
                "clustering": clustering.to_dict(),
                "ranges": [r.to_dict() for r in ranges],
            }
            path = config.out_dir / f"ranges_{side.value}.json"
            _write(path, _json_dumps(payload))
            written.append(path)

        scheme_path = config.out_dir / "scheme.json"
        _write(scheme_path, _json_dumps({"config": config.echo(), **scheme.to_dict()}))
        written.append(scheme_path)

        table_path = config.out_dir / "classes.txt"
        _write(table_path, render_class_table(scheme))
        written.append(table_path)

        renders = {
            "text": ("maps.txt", lambda: render_text(maps)),
            "csv": ("maps.csv", lambda: render_csv(maps)),
            "svg": ("maps.svg", lambda: render_svg(maps)),
            "json": (
                "maps.json",
                lambda: _json_dumps(
                    {"config": config.echo(), "maps": [m.to_dict() for m in maps]}
                ),
            ),
        }
        for fmt in FORMATS:
            if fmt in config.formats:
                name, producer = renders[fmt]
                path = config.out_dir / name
                _write(path, producer())
                written.append(path)
    except OSError as err:
        print(f"error: cannot write outputs: {err}", file=sys.stderr)
        return EXIT_OUTPUT

    for side in Side:
        clustering, _ = results[side]
        status = "converged" if clustering.converged else "iteration cap hit"
        print(
            f"{side}: {len(clustering.values)} features, k={clustering.k}, "
            f"objective {clustering.objective:.4f} uT "
            f"({status} after {clustering.iterations_used} iterations)"
        )
    print()
    print("emission ranges (uT):")
    for side in Side:
        for r in results[side][1]:
            ext = f"> {r.ext_min - 0.01:.2f}" if r.open_top else f"{r.ext_min:.2f} - {r.ext_max:.2f}"
            print(
                f"  {side.value:<6}  rank {r.rank}  "
                f"{r.raw_min:.4f} - {r.raw_max:.4f}  ->  {ext}"
            )
    print()
    print(render_class_table(scheme), end="")
    print()
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(inputs: tuple[Path, ...]) -> int:
    try:
        points = _load_points(inputs)
        if not points:
            raise EmptyInput("no measurement points")
    except FluxbandsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT

    by_device: dict[str, dict[Side, set[int]]] = {}
    for p in points:
        by_device.setdefault(p.device_id, {}).setdefault(p.side, set()).add(p.grid_index)

    ok = True
    for device in sorted(by_device):
        parts = []
        for side in Side:
            if side not in by_device[device]:
                continue
            got = by_device[device][side]
            missing = sorted(set(range(1, GRID_SIZE + 1)) - got)
            if missing:
                ok = False
                parts.append(
                    f"{side.value} {len(got)}/{GRID_SIZE} "
                    f"(missing {', '.join(map(str, missing))})"
                )
            else:
                parts.append(f"{side.value} {len(got)}/{GRID_SIZE}")
        print(f"{device}: {', '.join(parts)}")
    print(f"{len(by_device)} devices, {len(points)} points")
    if not ok:
        print("error: incomplete grids", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxbands",
        description="Cluster grid-based magnetic flux measurements into "
        "emission ranges and per-device dangerousness maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline")
    analyze.add_argument("--input", type=Path, nargs="+", required=True,
                         help="measurement CSV file(s)")
    analyze.add_argument("--k", type=int, default=5, help="clusters per side")
    analyze.add_argument("--restarts", type=int, default=50,
                         help="independent clustering runs per side")
    analyze.add_argument("--seed", type=int, default=0, help="RNG seed")
    analyze.add_argument("--limit", type=float, default=DEFAULT_LIMIT_UT,
                         help="reference exposure limit in uT")
    analyze.add_argument("--out", type=Path, required=True,
                         help="output directory")
    analyze.add_argument("--format", default=",".join(FORMATS),
                         help="comma-separated map formats: text,csv,svg,json")

    validate = sub.add_parser("validate", help="check input completeness")
    validate.add_argument("--input", type=Path, nargs="+", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(tuple(args.input))
    try:
        config = RunConfig(
            inputs=tuple(args.input),
            out_dir=args.out,
            k=args.k,
            restarts=args.restarts,
            seed=args.seed,
            limit=args.limit,
            formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
        )
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    return cmd_analyze(config)


if __name__ == "__main__":
    sys.exit(main())
