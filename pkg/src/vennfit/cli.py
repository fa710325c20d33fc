"""Command-line front end: files in, SVG/PNG/JSON out, per-epoch progress.

Exit codes: 0 success, 1 input error, 2 usage error, 3 optimizer divergence.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .colors import DEFAULT_PALETTE, WHITE, Color, parse_color
from .errors import DivergenceError, InputError
from .geometry import Circle
from .optimizer import LayoutSession, LayoutState, RunConfig, RunStatus, run
from .render import DiagramConfig, fitted_circles, rasterize_png, render_svg
from .setops import (
    MAX_SETS,
    MIN_SETS,
    IdSet,
    RegionTable,
    build_region_table,
    dedupe,
    parse_id_list,
)

MIN_SEGMENTS = 16


@dataclass(frozen=True)
class SetInput:
    name: str
    path: str
    color: Optional[Color] = None


@dataclass(frozen=True)
class CliConfig:
    inputs: tuple[SetInput, ...]
    title: str = ""
    subtitle: str = ""
    label_mode: str = "absolute"
    background: Color = WHITE
    width: float = 800.0
    height: float = 800.0
    seed: int = 0
    max_epochs: int = 20000
    segments: int = 256
    precision: float = 1.0
    out_svg: Optional[str] = None
    out_png: Optional[str] = None
    out_regions: Optional[str] = None
    quiet: bool = False


def _parse_set_flag(value: str) -> SetInput:
    name, sep, rest = value.partition("=")
    name = name.strip()
    if not sep or not name or not rest:
        raise argparse.ArgumentTypeError(
            f"expected NAME=PATH[:#RRGGBB], got {value!r}"
        )
    path, sep, color_text = rest.rpartition(":")
    if sep and color_text.startswith("#"):
        try:
            color = parse_color(color_text)
        except InputError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
        return SetInput(name=name, path=path, color=color)
    return SetInput(name=name, path=rest, color=None)


def _color_flag(value: str) -> Color:
    try:
        return parse_color(value)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vennfit",
        description=(
            "Generate an area-proportional Venn/Euler diagram from 2-10 ID lists. "
            "Inputs are text files with one ID per line and/or comma-separated."
        ),
    )
    p.add_argument(
        "--set",
        dest="sets",
        metavar="NAME=PATH[:#RRGGBB]",
        type=_parse_set_flag,
        action="append",
        default=[],
        help="named input list; repeat 2-10 times (optional circle color)",
    )
    p.add_argument("--title", default="", help="main title")
    p.add_argument("--subtitle", default="", help="subtitle")
    p.add_argument(
        "--labels",
        choices=["absolute", "percent", "none"],
        default="absolute",
        help="region label mode (default absolute)",
    )
    p.add_argument("--bg", type=_color_flag, default=WHITE, metavar="#RRGGBB",
                   help="background color (default #ffffff)")
    p.add_argument("--width", type=float, default=800.0, help="canvas width (default 800)")
    p.add_argument("--height", type=float, default=800.0, help="canvas height (default 800)")
    p.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
    p.add_argument("--max-epochs", type=int, default=20000, help="epoch cap (default 20000)")
    p.add_argument("--segments", type=int, default=256,
                   help="circle discretization for label geometry (default 256)")
    p.add_argument("--precision", type=float, default=1.0,
                   help="label pole search precision in canvas units (default 1.0)")
    p.add_argument("--out", dest="out_svg", metavar="PATH.svg", help="write vector output")
    p.add_argument("--png", dest="out_png", metavar="PATH.png", help="write raster output")
    p.add_argument("--regions", dest="out_regions", metavar="PATH.json",
                   help="write the region report")
    p.add_argument("--quiet", action="store_true", help="suppress per-epoch progress")
    return p


def parse_cli(argv: Sequence[str]) -> CliConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if not MIN_SETS <= len(ns.sets) <= MAX_SETS:
        parser.error(f"need between {MIN_SETS} and {MAX_SETS} --set flags, got {len(ns.sets)}")
    outputs = [p for p in (ns.out_svg, ns.out_png, ns.out_regions) if p]
    if not outputs:
        parser.error("no output requested; pass at least one of --out/--png/--regions")
    if len(set(outputs)) != len(outputs):
        parser.error("output paths must be distinct")
    if ns.width <= 0 or ns.height <= 0:
        parser.error("--width/--height must be positive")
    if ns.max_epochs < 1:
        parser.error("--max-epochs must be >= 1")
    if ns.segments < MIN_SEGMENTS:
        parser.error(f"--segments must be >= {MIN_SEGMENTS}")
    if ns.precision <= 0:
        parser.error("--precision must be positive")
    return CliConfig(
        inputs=tuple(ns.sets),
        title=ns.title,
        subtitle=ns.subtitle,
        label_mode=ns.labels,
        background=ns.bg,
        width=ns.width,
        height=ns.height,
        seed=ns.seed,
        max_epochs=ns.max_epochs,
        segments=ns.segments,
        precision=ns.precision,
        out_svg=ns.out_svg,
        out_png=ns.out_png,
        out_regions=ns.out_regions,
        quiet=ns.quiet,
    )


def _load_sets(config: CliConfig) -> list[IdSet]:
    sets = []
    for i, spec in enumerate(config.inputs):
        try:
            text = Path(spec.path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {spec.path}: {exc}") from exc
        ids = dedupe(parse_id_list(text))
        if not ids:
            raise InputError(f"input file {spec.path} contains no identifiers")
        color = spec.color or DEFAULT_PALETTE[i % len(DEFAULT_PALETTE)]
        sets.append(IdSet(name=spec.name, ids=tuple(ids), color=color))
    return sets


def dump_regions(table: RegionTable, circles: Sequence[Circle], state: LayoutState) -> str:
    """Deterministic JSON report: sets, regions, intersections, final layout."""
    regions = [
        {
            "sets": list(table.mask_names(mask)),
            "exclusive_count": len(ids),
            "ids": list(ids),
        }
        for mask, ids in table.exclusive.items()
    ]
    displayed = {mask for mask, _ in table.display}
    intersections = [
        {
            "sets": list(table.mask_names(mask)),
            "count": len(ids),
            "ids": list(ids),
            "pruned": mask not in displayed,
        }
        for mask, ids in table.inclusive.items()
    ]
    doc = {
        "sets": [
            {"name": name, "size": table.set_size(i)}
            for i, name in enumerate(table.names)
        ],
        "union_size": table.union_size,
        "regions": regions,
        "intersections": intersections,
        "layout": {
            "circles": [
                {"name": name, "x": round(c.x, 6), "y": round(c.y, 6), "r": round(c.r, 6)}
                for name, c in zip(table.names, circles)
            ],
            "loss": state.loss,
            "epochs": state.epoch,
            "stop_reason": state.status.value,
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def run_pipeline(config: CliConfig, stop_signal=None) -> int:
    """Execute parse -> regions -> geometry -> layout -> outputs."""
    err = sys.stderr
    try:
        sets = _load_sets(config)
        table = build_region_table(sets)
        run_config = RunConfig(
            seed=config.seed,
            max_epochs=config.max_epochs,
            canvas=(config.width, config.height),
        )
        session = LayoutSession.from_sets(sets, run_config)

        def progress(state: LayoutState) -> None:
            if not config.quiet:
                print(
                    f"epoch={state.epoch} loss={state.loss:.6f} lr={state.lr:.6f}",
                    file=err,
                )

        state = run(session.model, run_config, stop_signal=stop_signal,
                    epoch_callback=progress)
        if not config.quiet:
            print(
                f"status={state.status.value} epochs={state.epoch} loss={state.loss:.6f}",
                file=err,
            )

        diagram = DiagramConfig(
            title=config.title,
            subtitle=config.subtitle,
            label_mode=config.label_mode,
            set_colors=tuple(s.color for s in sets),
            background=config.background,
            width=config.width,
            height=config.height,
        )
        svg = render_svg(
            state.positions, session.model, table, diagram,
            segments=config.segments, precision=config.precision,
        )
        if config.out_svg:
            Path(config.out_svg).write_text(svg, encoding="utf-8")
            print(f"wrote {config.out_svg}")
        if config.out_png:
            Path(config.out_png).write_bytes(rasterize_png(svg))
            print(f"wrote {config.out_png}")
        if config.out_regions:
            circles = fitted_circles(state.positions, session.model.radii, diagram)
            Path(config.out_regions).write_text(
                dump_regions(table, circles, state), encoding="utf-8"
            )
            print(f"wrote {config.out_regions}")
        return 0
    except DivergenceError as exc:
        print(f"error: {exc}", file=err)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> None:
    config = parse_cli(sys.argv[1:] if argv is None else argv)
    stop = threading.Event()
    previous = None

    def on_interrupt(signum, frame):
        if stop.is_set():
            signal.signal(signal.SIGINT, previous or signal.SIG_DFL)
            raise KeyboardInterrupt
        stop.set()

    try:
        previous = signal.signal(signal.SIGINT, on_interrupt)
    except ValueError:
        previous = None  # not on the main thread; skip the graceful-stop hook
    try:
        sys.exit(run_pipeline(config, stop_signal=stop))
    finally:
        if previous is not None:
            signal.signal(signal.SIGINT, previous)


if __name__ == "__main__":
    main()
