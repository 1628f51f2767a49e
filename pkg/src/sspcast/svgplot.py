"""Minimal deterministic SVG charts.

Hand-rolled so report files are byte-identical across runs and machines:
fixed canvas geometry, fixed-decimal coordinates, no timestamps, no external
plotting dependency. Two chart kinds cover the harness: line charts (traces
vs month, profile vs depth with an inverted axis) and bar charts (method
comparisons).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 62, 20, 34, 46


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    """About n round-valued ticks covering [lo, hi]."""
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10.0 ** np.floor(np.log10(raw))
    for m in (1.0, 2.0, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    first = np.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else float(t))
        t += step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def _bounds(values, pad_frac: float = 0.05) -> tuple[float, float]:
    lo = float(min(values))
    hi = float(max(values))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = (hi - lo) * pad_frac
    return lo - pad, hi + pad


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
    ]


def escape(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _axes(xlo, xhi, ylo, yhi, x_label, y_label, invert_y, x_ticks=True) -> list[str]:
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    parts = [
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    ]
    for t in _nice_ticks(xlo, xhi) if x_ticks else []:
        px = x0 + (t - xlo) / (xhi - xlo) * (x1 - x0)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 4}" '
            f'stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 17}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_tick_label(t)}</text>'
        )
    for t in _nice_ticks(ylo, yhi):
        frac = (t - ylo) / (yhi - ylo)
        py = y1 + frac * (y0 - y1) if invert_y else y0 - frac * (y0 - y1)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" '
            f'stroke="#333"/>'
        )
        parts.append(
            f'<text x="{x0 - 7}" y="{_fmt(py + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_tick_label(t)}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.0f}" y="{_H - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.0f})">{escape(y_label)}</text>'
    )
    return parts


def line_chart(
    series,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    invert_y: bool = False,
) -> str:
    """Render (label, xs, ys) triples as polylines with a legend.

    invert_y puts the y minimum at the top, the natural orientation for
    depth profiles.
    """
    series = [(label, np.asarray(xs, float), np.asarray(ys, float)) for label, xs, ys in series]
    if not series:
        raise ValidationError("line chart needs at least one series")
    for label, xs, ys in series:
        if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 1:
            raise ValidationError(f"series {label!r} has mismatched x/y data")
    xlo, xhi = _bounds(np.concatenate([xs for _, xs, _ in series]))
    ylo, yhi = _bounds(np.concatenate([ys for _, _, ys in series]))
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    parts = _header(title) + _axes(xlo, xhi, ylo, yhi, x_label, y_label, invert_y)
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = []
        for x, y in zip(xs, ys):
            px = x0 + (x - xlo) / (xhi - xlo) * (x1 - x0)
            frac = (y - ylo) / (yhi - ylo)
            py = y1 + frac * (y0 - y1) if invert_y else y0 - frac * (y0 - y1)
            pts.append(f"{_fmt(px)},{_fmt(py)}")
        parts.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        ly = _MT + 14 + 14 * i
        parts.append(
            f'<line x1="{x1 - 120}" y1="{ly - 4}" x2="{x1 - 100}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{x1 - 95}" y="{ly}" font-family="sans-serif" '
            f'font-size="10">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(items, title: str = "", y_label: str = "") -> str:
    """Render (label, value) pairs as vertical bars with value captions."""
    items = [(label, float(v)) for label, v in items]
    if not items:
        raise ValidationError("bar chart needs at least one bar")
    ylo = 0.0
    yhi = _bounds([v for _, v in items], pad_frac=0.08)[1]
    if yhi <= 0:
        yhi = 1.0
    x0, x1 = _ML, _W - _MR
    y0, y1 = _H - _MB, _MT
    parts = _header(title) + _axes(0, len(items), ylo, yhi, "", y_label, False, x_ticks=False)
    slot = (x1 - x0) / len(items)
    for i, (label, v) in enumerate(items):
        color = PALETTE[i % len(PALETTE)]
        bw = slot * 0.6
        bx = x0 + slot * i + slot * 0.2
        bh = (v - ylo) / (yhi - ylo) * (y0 - y1)
        parts.append(
            f'<rect x="{_fmt(bx)}" y="{_fmt(y0 - bh)}" width="{_fmt(bw)}" '
            f'height="{_fmt(bh)}" fill="{color}"/>'
        )
        cx = bx + bw / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(y0 - bh - 4)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{v:.4f}</text>'
        )
        parts.append(
            f'<text x="{_fmt(cx)}" y="{y0 + 17}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
