"""Minimal static SVG line charts for sweeps and convergence runs."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _span(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def line_chart_svg(
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> str:
    """Render named ``(x, y)`` series as polylines with a legend."""
    if not series:
        raise ValueError("nothing to plot")
    xs = [x for xv, _ in series.values() for x in xv]
    ys = [y for _, yv in series.values() for y in yv]
    x0, x1 = _span(xs)
    y0, y1 = _span(ys)
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def px(x: float) -> float:
        return MARGIN + (x - x0) / (x1 - x0) * pw

    def py(y: float) -> float:
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(x_label)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(y_label)}</text>',
    ]
    for value, anchor, pos in ((x0, "start", px(x0)), (x1, "end", px(x1))):
        out.append(f'<text x="{pos:.2f}" y="{HEIGHT - MARGIN + 14}" text-anchor="{anchor}" font-size="10">{value:.4g}</text>')
    for value in (y0, y1):
        out.append(f'<text x="{MARGIN - 4}" y="{py(value):.2f}" text-anchor="end" font-size="10">{value:.4g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN}" y1="{py(0):.2f}" x2="{MARGIN + pw}" y2="{py(0):.2f}" stroke="#bbbbbb"/>')
    for k, (name, (xv, yv)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xv, yv))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN + 14 + 14 * k
        out.append(f'<line x1="{MARGIN + 8}" y1="{ly - 4}" x2="{MARGIN + 24}" y2="{ly - 4}" stroke="{color}"/>')
        out.append(f'<text x="{MARGIN + 28}" y="{ly}" font-size="10">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_line_chart(path: str | Path, series, title: str = "", x_label: str = "", y_label: str = "") -> None:
    Path(path).write_text(line_chart_svg(series, title, x_label, y_label), encoding="utf-8")
