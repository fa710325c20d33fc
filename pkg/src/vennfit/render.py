"""Diagram rendering: viewport fitting, label placement, SVG and PNG output.

World coordinates are y-up; the vertical flip happens once, at emission.
Output is byte-deterministic: fixed attribute order, fixed decimal formatting,
no timestamps.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from PIL import Image, ImageDraw, ImageFont

from .colors import BLACK, WHITE, Color
from .errors import InputError, RenderError
from .geometry import (
    Circle,
    CircleModel,
    Polygon,
    largest_part,
    pole_of_inaccessibility,
    region_polygons,
)
from .optimizer import Positions
from .setops import RegionTable

LABEL_MODES = ("absolute", "percent", "none")

MARGIN_FRAC = 0.08
_STROKE_WIDTH = 1.5
_SUPERSAMPLE = 4


@dataclass(frozen=True)
class DiagramConfig:
    title: str = ""
    subtitle: str = ""
    label_mode: str = "absolute"
    set_colors: tuple[Color, ...] = ()
    background: Color = WHITE
    width: float = 800.0
    height: float = 800.0
    fill_opacity: float = 0.5
    title_font: float = 28.0
    subtitle_font: float = 18.0
    label_font: float = 16.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InputError(f"canvas must be positive, got {self.width}x{self.height}")
        if self.label_mode not in LABEL_MODES:
            raise InputError(f"label_mode must be one of {LABEL_MODES}, got {self.label_mode!r}")
        if not 0.0 <= self.fill_opacity <= 1.0:
            raise InputError(f"fill_opacity must be in 0..1, got {self.fill_opacity}")


@dataclass(frozen=True)
class LabelSpec:
    text: str
    anchor: tuple[float, float]
    kind: str  # region_count | set_title | title | subtitle


def title_band(config: DiagramConfig) -> float:
    """Vertical headroom reserved at the top for title and subtitle."""
    band = 0.0
    if config.title:
        band += 16.0 + config.title_font
    if config.subtitle:
        band += 8.0 + config.subtitle_font
    if band:
        band += 8.0
    return band


def fit_viewport(
    positions: Sequence[tuple[float, float]],
    radii: Sequence[float],
    width: float,
    height: float,
    margin: float = MARGIN_FRAC,
    top_band: float = 0.0,
) -> tuple[list[tuple[float, float]], list[float]]:
    """Uniformly scale + translate the circles into the canvas minus margins.

    Uniform scaling preserves every area ratio and distance/target ratio.
    """
    min_x = min(x - r for (x, _), r in zip(positions, radii))
    max_x = max(x + r for (x, _), r in zip(positions, radii))
    min_y = min(y - r for (_, y), r in zip(positions, radii))
    max_y = max(y + r for (_, y), r in zip(positions, radii))

    box_x0, box_x1 = margin * width, width - margin * width
    box_y0, box_y1 = margin * height, height - margin * height - top_band

    scale = min((box_x1 - box_x0) / (max_x - min_x), (box_y1 - box_y0) / (max_y - min_y))
    bcx, bcy = (box_x0 + box_x1) / 2.0, (box_y0 + box_y1) / 2.0
    ccx, ccy = (min_x + max_x) / 2.0, (min_y + max_y) / 2.0

    fitted = [(bcx + scale * (x - ccx), bcy + scale * (y - ccy)) for x, y in positions]
    return fitted, [r * scale for r in radii]


def fitted_circles(
    positions: Positions, radii: Sequence[float], config: DiagramConfig
) -> list[Circle]:
    """The final circle geometry as drawn, shared by SVG output and the JSON dump."""
    pos, rs = fit_viewport(
        positions, radii, config.width, config.height, top_band=title_band(config)
    )
    return [Circle(x, y, r) for (x, y), r in zip(pos, rs)]


def format_label(count: int, union_size: int, mode: str) -> str:
    """Region label text: plain count, percent of the union, or nothing."""
    if mode == "none":
        return ""
    if mode == "absolute":
        return str(count)
    if mode == "percent":
        pct = (Decimal(count) * 100 / Decimal(union_size)).quantize(
            Decimal("0.1"), rounding=ROUND_HALF_UP
        )
        return f"{pct}%"
    raise InputError(f"unknown label mode {mode!r}")


def _clamp_anchor(x: float, y: float, config: DiagramConfig) -> tuple[float, float]:
    return (min(max(x, 0.0), config.width), min(max(y, 0.0), config.height))


def compute_labels(
    table: RegionTable,
    region_polys: Mapping[int, Polygon],
    circles: Sequence[Circle],
    config: DiagramConfig,
    precision: float = 1.0,
    segments: int = 256,
) -> list[LabelSpec]:
    """Region counts at each region's pole of inaccessibility, set titles at the
    pole of each set's exclusive-only region (or above the circle when that
    region is geometrically absent), then title and subtitle in the top band.
    """
    labels: list[LabelSpec] = []

    if config.label_mode != "none":
        for mask, ids in table.exclusive.items():
            poly = region_polys.get(mask)
            if poly is None:
                continue
            pole = pole_of_inaccessibility(largest_part(poly), precision)
            labels.append(
                LabelSpec(
                    text=format_label(len(ids), table.union_size, config.label_mode),
                    anchor=pole.point,
                    kind="region_count",
                )
            )

    for i, name in enumerate(table.names):
        mask = 1 << i
        poly = region_polys.get(mask)
        if poly is None:
            poly = region_polygons(circles, [mask], segments).get(mask)
        if poly is not None:
            pole = pole_of_inaccessibility(largest_part(poly), precision)
            ax, ay = pole.point[0], pole.point[1] + config.label_font
        else:
            c = circles[i]
            ax, ay = c.x, c.y + c.r + 0.75 * config.label_font
        labels.append(
            LabelSpec(text=name, anchor=_clamp_anchor(ax, ay, config), kind="set_title")
        )

    if config.title:
        y = config.height - (16.0 + config.title_font / 2.0)
        labels.append(LabelSpec(config.title, (config.width / 2.0, y), "title"))
    if config.subtitle:
        drop = 16.0 + (config.title_font + 8.0 if config.title else 0.0)
        y = config.height - (drop + config.subtitle_font / 2.0)
        labels.append(LabelSpec(config.subtitle, (config.width / 2.0, y), "subtitle"))
    return labels


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _text_element(label: LabelSpec, config: DiagramConfig) -> str:
    size = {
        "region_count": config.label_font,
        "set_title": config.label_font,
        "title": config.title_font,
        "subtitle": config.subtitle_font,
    }[label.kind]
    weight = ' font-weight="bold"' if label.kind in ("set_title", "title") else ""
    x, y = label.anchor
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(config.height - y)}" '
        f'text-anchor="middle" dominant-baseline="central" '
        f'font-family="Helvetica,Arial,sans-serif" font-size="{size:.1f}"'
        f'{weight} fill="#000000">{escape(label.text)}</text>'
    )


def render_svg(
    positions: Positions,
    model: CircleModel,
    table: RegionTable,
    config: DiagramConfig,
    segments: int = 256,
    precision: float = 1.0,
) -> str:
    """Assemble the diagram document: background, one circle per set in input
    order, then labels.  Identical inputs yield identical bytes."""
    circles = fitted_circles(positions, model.radii, config)
    polys = region_polygons(circles, list(table.exclusive), segments)
    labels = compute_labels(table, polys, circles, config, precision, segments)

    colors = list(config.set_colors)
    if len(colors) < len(circles):
        raise InputError(f"need {len(circles)} set colors, got {len(colors)}")

    w, h = config.width, config.height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(w)}" height="{_fmt(h)}" viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="{config.background.hex}" fill-opacity="{config.background.alpha:.4f}"/>',
    ]
    for c, color in zip(circles, colors):
        opacity = config.fill_opacity * color.alpha
        parts.append(
            f'<circle cx="{_fmt(c.x)}" cy="{_fmt(h - c.y)}" r="{_fmt(c.r)}" '
            f'fill="{color.hex}" fill-opacity="{opacity:.4f}" '
            f'stroke="{color.hex}" stroke-width="{_STROKE_WIDTH:.1f}"/>'
        )
    parts.extend(_text_element(lbl, config) for lbl in labels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _load_font(size: int, bold: bool) -> ImageFont.FreeTypeFont | ImageFont.ImageFont:
    import matplotlib

    name = "DejaVuSans-Bold.ttf" if bold else "DejaVuSans.ttf"
    path = f"{matplotlib.get_data_path()}/fonts/ttf/{name}"
    try:
        return ImageFont.truetype(path, size)
    except OSError:
        return ImageFont.load_default()


def rasterize_png(svg_text: str, pixel_scale: float = 1.0) -> bytes:
    """Rasterize a document produced by render_svg.

    Understands exactly the subset render_svg emits (rect, circle, text).
    Shapes are drawn supersampled and downsampled; text is drawn at target
    resolution to stay crisp.
    """
    if pixel_scale <= 0:
        raise RenderError(f"pixel_scale must be positive, got {pixel_scale}")
    try:
        root = ET.fromstring(svg_text)
    except ET.ParseError as exc:
        raise RenderError(f"invalid vector document: {exc}") from exc
    if _local(root.tag) != "svg":
        raise RenderError(f"expected <svg> root, got <{_local(root.tag)}>")
    try:
        width = float(root.get("width"))
        height = float(root.get("height"))
    except (TypeError, ValueError) as exc:
        raise RenderError("svg root lacks numeric width/height") from exc

    out_w = round(width * pixel_scale)
    out_h = round(height * pixel_scale)
    ss = _SUPERSAMPLE
    shape_scale = pixel_scale * ss

    base = Image.new("RGBA", (out_w * ss, out_h * ss), (255, 255, 255, 255))
    texts = []
    for el in root.iter():
        tag = _local(el.tag)
        if tag == "rect":
            x = float(el.get("x", "0")) * shape_scale
            y = float(el.get("y", "0")) * shape_scale
            rw = float(el.get("width", "0")) * shape_scale
            rh = float(el.get("height", "0")) * shape_scale
            fill = _rgba(el.get("fill", "#000000"), el.get("fill-opacity", "1"))
            layer = Image.new("RGBA", base.size, (0, 0, 0, 0))
            ImageDraw.Draw(layer).rectangle([x, y, x + rw, y + rh], fill=fill)
            base = Image.alpha_composite(base, layer)
        elif tag == "circle":
            cx = float(el.get("cx", "0")) * shape_scale
            cy = float(el.get("cy", "0")) * shape_scale
            r = float(el.get("r", "0")) * shape_scale
            fill = _rgba(el.get("fill", "#000000"), el.get("fill-opacity", "1"))
            stroke = _rgba(el.get("stroke", "#000000"), "1")
            sw = float(el.get("stroke-width", "1")) * shape_scale
            layer = Image.new("RGBA", base.size, (0, 0, 0, 0))
            draw = ImageDraw.Draw(layer)
            draw.ellipse([cx - r, cy - r, cx + r, cy + r], fill=fill)
            base = Image.alpha_composite(base, layer)
            outline = Image.new("RGBA", base.size, (0, 0, 0, 0))
            ImageDraw.Draw(outline).ellipse(
                [cx - r, cy - r, cx + r, cy + r], outline=stroke, width=max(1, round(sw))
            )
            base = Image.alpha_composite(base, outline)
        elif tag == "text":
            texts.append(el)

    img = base.resize((out_w, out_h), Image.LANCZOS)
    draw = ImageDraw.Draw(img)
    for el in texts:
        x = float(el.get("x", "0")) * pixel_scale
        y = float(el.get("y", "0")) * pixel_scale
        size = max(1, round(float(el.get("font-size", "16")) * pixel_scale))
        bold = el.get("font-weight") == "bold"
        fill = _rgba(el.get("fill", "#000000"), "1")
        draw.text((x, y), el.text or "", font=_load_font(size, bold), fill=fill, anchor="mm")

    buf = io.BytesIO()
    img.convert("RGB").save(buf, format="PNG")
    return buf.getvalue()


def _rgba(hex_color: str, opacity: str) -> tuple[int, int, int, int]:
    s = hex_color.lstrip("#")
    if len(s) != 6:
        raise RenderError(f"unsupported fill {hex_color!r}")
    alpha = round(255 * float(opacity))
    return (int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16), min(255, max(0, alpha)))
