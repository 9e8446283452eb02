#!/usr/bin/env python3
"""
SVG Rendering

Divides with cusps drawn as Kirby diagrams (dotted segments with their dot,
attaching curves with cusp markers and framing labels) and planar link
diagrams with gaps in the under-strands. Output is deterministic for fixed
input.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import svgwrite

from .diagram import Diagram
from .divide import DivideWithCusps, GeometricCurve

logger = logging.getLogger(__name__)

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


@dataclass(frozen=True)
class RenderStyle:
    size: int = 800
    padding: float = 0.06
    stroke: float = 2.0
    dotted_stroke: float = 3.0
    dot_radius: float = 5.0
    cusp_radius: float = 2.5
    gap: float = 7.0
    strip_opacity: float = 0.08
    font_size: int = 14
    show_companions: bool = False

    def __post_init__(self):
        for name in ("size", "stroke", "dotted_stroke", "dot_radius", "cusp_radius", "gap", "font_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"RenderStyle.{name} must be positive")
        if not 0 <= self.padding < 0.5:
            raise ValueError("RenderStyle.padding must lie in [0, 0.5)")


def label_color(label: str) -> str:
    """Colour fixed by the component label alone."""
    base = label.split(":+")[0].split(":-")[0].rstrip("'")
    digest = hashlib.md5(base.encode()).digest()
    return PALETTE[digest[0] % len(PALETTE)]


class _Viewport:
    """Maps model coordinates (y up) onto the page (y down), longer side fixed to style.size."""

    def __init__(self, points: Iterable[Tuple[float, float]], style: RenderStyle):
        xs, ys = [], []
        for x, y in points:
            xs.append(x)
            ys.append(y)
        if not xs:
            xs, ys = [-1.0, 1.0], [-1.0, 1.0]
        self.x0, self.y1 = min(xs), max(ys)
        width = max(max(xs) - self.x0, 1e-9)
        height = max(self.y1 - min(ys), 1e-9)
        self.scale = style.size * (1 - 2 * style.padding) / max(width, height)
        self.offset = style.size * style.padding
        self.width = round(width * self.scale + 2 * self.offset, 3)
        self.height = round(height * self.scale + 2 * self.offset, 3)

    def __call__(self, p: Sequence[float]) -> Tuple[float, float]:
        x = self.offset + (float(p[0]) - self.x0) * self.scale
        y = self.offset + (self.y1 - float(p[1])) * self.scale
        return round(x, 3), round(y, 3)


def _drawing(view: _Viewport) -> svgwrite.Drawing:
    drawing = svgwrite.Drawing(size=(view.width, view.height), debug=False)
    drawing.add(drawing.rect(insert=(0, 0), size=(view.width, view.height), fill="white"))
    return drawing


# Divides


def _domain_outline(d: DivideWithCusps) -> List[Tuple[float, float]]:
    if d.domain.kind == "disk":
        return [(math.cos(2 * math.pi * k / 128), math.sin(2 * math.pi * k / 128)) for k in range(128)]
    R = float(d.domain.R)
    return [(-R, -1.0), (R, -1.0), (R, 1.0), (-R, 1.0)]


def _draw_strip_band(drawing, view: _Viewport, curve: GeometricCurve, style: RenderStyle):
    strip = curve.strip
    xs = [float(v[0]) for v in curve.vertices]
    lo = view((min(xs), float(strip.h_prime + strip.eps)))
    hi = view((max(xs), float(strip.h_prime - strip.eps)))
    drawing.add(
        drawing.rect(
            insert=lo,
            size=(round(hi[0] - lo[0], 3), round(hi[1] - lo[1], 3)),
            fill=label_color(curve.label),
            fill_opacity=style.strip_opacity,
        )
    )


def _draw_divide_curve(drawing, view: _Viewport, curve: GeometricCurve, style: RenderStyle):
    color = "black" if curve.role == "dotted" else label_color(curve.label)
    width = style.dotted_stroke if curve.role == "dotted" else style.stroke
    points = [view(v) for v in curve.vertices]
    if curve.closed:
        shape = drawing.polygon(points, fill="none")
    else:
        shape = drawing.polyline(points, fill="none")
    shape.stroke(color, width=width, linejoin="round", linecap="round")
    drawing.add(shape)

    if curve.role == "dotted":
        # dot near the upper end
        a, b = curve.vertices[0], curve.vertices[-1]
        t = 0.85
        dot = (float(a[0]) + t * float(b[0] - a[0]), float(a[1]) + t * float(b[1] - a[1]))
        drawing.add(drawing.circle(center=view(dot), r=style.dot_radius, fill="black"))
        return

    for index in sorted(curve.cusps):
        drawing.add(
            drawing.circle(center=points[index], r=style.cusp_radius, fill="white", stroke=color, stroke_width=1)
        )
    if curve.role == "attaching":
        anchor = max(points, key=lambda p: (p[0], -p[1]))
        drawing.add(
            drawing.text(
                "0",
                insert=(round(anchor[0] + style.font_size / 2, 3), round(anchor[1], 3)),
                font_size=style.font_size,
                font_family="sans-serif",
                fill=color,
            )
        )


def render_divide_svg(d: DivideWithCusps, style: Optional[RenderStyle] = None) -> str:
    """Dotted segments, attaching curves with cusps and framing labels."""
    style = style or RenderStyle()
    outline = _domain_outline(d)
    vertices = [(float(x), float(y)) for c in d.curves for x, y in c.vertices]
    view = _Viewport(outline + vertices, style)
    drawing = _drawing(view)

    frame = drawing.polygon([view(p) for p in outline], fill="none")
    frame.stroke("#999999", width=1)
    drawing.add(frame)

    curves = [c for c in d.curves if style.show_companions or c.role != "companion"]
    for curve in curves:
        if curve.strip is not None and curve.role == "attaching":
            _draw_strip_band(drawing, view, curve, style)
    for curve in curves:
        _draw_divide_curve(drawing, view, curve, style)

    logger.debug(f"Rendered divide with {len(curves)} curves")
    return drawing.tostring()


# Link diagrams


def _unit(v: Sequence[float]) -> Tuple[float, float]:
    norm = math.hypot(v[0], v[1]) or 1.0
    return v[0] / norm, v[1] / norm


def render_diagram_svg(dg: Diagram, style: Optional[RenderStyle] = None) -> str:
    """Planar curves, each crossing drawn with a gap in its under-strand."""
    style = style or RenderStyle()
    view = _Viewport((p for pts in dg.planar.values() for p in pts), style)
    drawing = _drawing(view)

    for label in sorted(dg.planar):
        if not style.show_companions and label.endswith("'"):
            continue
        shape = drawing.polygon([view(p) for p in dg.planar[label]], fill="none")
        shape.stroke(label_color(label), width=style.stroke, linejoin="round")
        drawing.add(shape)

    reach = style.gap / view.scale
    for c in dg.crossings:
        if c.point is None or c.over_dir is None:
            continue
        if not style.show_companions and (c.over.endswith("'") or c.under.endswith("'")):
            continue
        center = view(c.point)
        drawing.add(drawing.circle(center=center, r=style.gap / 2 + style.stroke, fill="white"))
        ux, uy = _unit(c.over_dir)
        a = view((c.point[0] - reach * ux, c.point[1] - reach * uy))
        b = view((c.point[0] + reach * ux, c.point[1] + reach * uy))
        bridge = drawing.line(start=a, end=b)
        bridge.stroke(label_color(c.over), width=style.stroke, linecap="butt")
        drawing.add(bridge)

    logger.debug(f"Rendered diagram with {dg.crossing_count} crossings")
    return drawing.tostring()


def save_svg(content: str, path: str):
    with open(path, "w") as f:
        f.write(content)
