"""Minimal SVG line plots with a log-scale y axis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


@dataclass
class Series:
    label: str
    points: list
    dashed: bool = False


def log_plot(series, *, title="", xlabel="n", ylabel="probability", hline=None,
             width=640, height=420) -> str:
    """Render ``series`` (x, y) with y on log10 scale; non-positive y are skipped."""
    pts = [(x, y) for s in series for x, y in s.points if y > 0]
    if hline is not None:
        pts.append((pts[0][0] if pts else 0, hline))
    if not pts:
        raise ValueError("nothing to plot")
    xs = [p[0] for p in pts]
    lys = [math.log10(p[1]) for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = math.floor(min(lys)), math.ceil(max(lys))
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    left, right, top, bottom = 70, 160, 30, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - math.log10(y)) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">']
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    step = max(1, (y1 - y0) // 8)
    for e in range(y0, y1 + 1, step):
        y = top + (y1 - e) / (y1 - y0) * ph
        out.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    for k in range(6):
        xv = x0 + k * (x1 - x0) / 5
        x = sx(xv)
        out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{top + ph + 16}" text-anchor="middle">{xv:g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2}" transform="rotate(-90 16 {top + ph / 2})" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="18" text-anchor="middle">{escape(title)}</text>')
    if hline is not None:
        y = sy(hline)
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" '
                   f'stroke="gray" stroke-dasharray="6,4"/>')
        out.append(f'<text x="{left + pw + 4}" y="{y + 4:.1f}" fill="gray">{hline:g}</text>')
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in s.points if y > 0)
        dash = ' stroke-dasharray="3,3"' if s.dashed else ""
        if coords:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}"{dash}/>')
        ly = top + 12 + 14 * i
        out.append(f'<line x1="{left + pw + 8}" y1="{ly}" x2="{left + pw + 24}" y2="{ly}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{left + pw + 28}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
