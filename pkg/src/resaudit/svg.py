"""Deterministic SVG rendering of plot-data documents.

Purely mechanical: axes, ticks, one colour per series, points or polylines
depending on the series' role, and a legend of labels. No themes, no
interactivity; byte output is a pure function of the document.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import ValidationError
from .frame import PLOT_KINDS
from .io import PlotDataDocument

WIDTH, HEIGHT = 760, 480
MARGIN_LEFT, MARGIN_RIGHT = 70, 190
MARGIN_TOP, MARGIN_BOTTOM = 46, 56
N_TICKS = 5

PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

#: series parts drawn as connected lines rather than point clouds
_LINE_PARTS = {"smoother", "density", "env_lo", "env_hi", "arrow"}
#: plot kinds whose default geometry is a line
_LINE_KINDS = {"acf", "lift", "prc", "radar", "rec", "residual_density",
               "roc", "rroc", "tsecdf", "correlation", "halfnormal"}


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


def _series_part(series) -> str | None:
    part = series.aux.get("part")
    return part[0] if part else None


def _is_line(series) -> bool:
    part = _series_part(series)
    if part is not None:
        if part in _LINE_PARTS:
            return True
        if part in ("points", "scatter", "rug", "outliers", "box"):
            return False
    return series.kind in _LINE_KINDS


def _bounds(document: PlotDataDocument) -> tuple[float, float, float, float]:
    xs = np.concatenate([s.xs for s in document.series]) if document.series \
        else np.asarray([0.0, 1.0])
    ys = np.concatenate([s.ys for s in document.series]) if document.series \
        else np.asarray([0.0, 1.0])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_pad = 0.05 * (x_hi - x_lo)
    y_pad = 0.05 * (y_hi - y_lo)
    return x_lo - x_pad, x_hi + x_pad, y_lo - y_pad, y_hi + y_pad


def render_svg(document: PlotDataDocument) -> str:
    """Render one plot document to an SVG 1.1 string."""
    if document.plot_type not in PLOT_KINDS:
        raise ValidationError(f"unknown plot type {document.plot_type!r}")
    x_lo, x_hi, y_lo, y_hi = _bounds(document)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_LEFT}" y="24" font-family="sans-serif" '
        f'font-size="15" fill="#333">{escape(document.plot_type)}</text>',
    ]

    # axes
    x0, y0 = sx(x_lo), sy(y_lo)
    x1, y1 = sx(x_hi), sy(y_hi)
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" '
               f'y2="{_fmt(y0)}" stroke="#444" stroke-width="1"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" '
               f'y2="{_fmt(y1)}" stroke="#444" stroke-width="1"/>')
    for t in np.linspace(x_lo, x_hi, N_TICKS):
        px = sx(t)
        out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" '
                   f'y2="{_fmt(y0 + 4)}" stroke="#444" stroke-width="1"/>')
        out.append(f'<text x="{_fmt(px)}" y="{_fmt(y0 + 18)}" '
                   f'font-family="sans-serif" font-size="11" fill="#333" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in np.linspace(y_lo, y_hi, N_TICKS):
        py = sy(t)
        out.append(f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" '
                   f'y2="{_fmt(py)}" stroke="#444" stroke-width="1"/>')
        out.append(f'<text x="{_fmt(x0 - 7)}" y="{_fmt(py + 4)}" '
                   f'font-family="sans-serif" font-size="11" fill="#333" '
                   f'text-anchor="end">{_fmt(t)}</text>')

    # series
    label_colors: dict[str, str] = {}
    for series in document.series:
        if series.label not in label_colors:
            label_colors[series.label] = PALETTE[len(label_colors) % len(PALETTE)]
        color = label_colors[series.label]
        pts = [(sx(x), sy(y)) for x, y in zip(series.xs, series.ys)]
        if _is_line(series) and len(pts) > 1:
            path = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
            out.append(f'<polyline points="{path}" fill="none" '
                       f'stroke="{color}" stroke-width="1.5"/>')
        else:
            for px, py in pts:
                out.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.5" '
                           f'fill="{color}" fill-opacity="0.75"/>')

    # legend
    lx = WIDTH - MARGIN_RIGHT + 18
    for i, (label, color) in enumerate(label_colors.items()):
        ly = MARGIN_TOP + 16 * i
        out.append(f'<rect x="{lx}" y="{_fmt(ly)}" width="10" height="10" '
                   f'fill="{color}"/>')
        out.append(f'<text x="{lx + 15}" y="{_fmt(ly + 9)}" '
                   f'font-family="sans-serif" font-size="11" fill="#333">'
                   f'{escape(label)}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
