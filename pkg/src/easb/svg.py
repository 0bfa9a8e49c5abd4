"""Hand-written SVG scatter plot of balance points, colored by cluster."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .balance import SiteProfile
from .clustering import Partition
from .similarity import balance_point, symmetric_transform

PALETTE = ("#1f77b4", "#ff7f0e", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79")
TRANSFORMED = "#2ca02c"

SIZE = 480
MARGIN = 60


def _px(v: float) -> float:
    return MARGIN + v * (SIZE - 2 * MARGIN)


def _py(v: float) -> float:
    return SIZE - MARGIN - v * (SIZE - 2 * MARGIN)


def scatter_svg(sites: Sequence[SiteProfile], partition: Partition, title: str = "") -> str:
    """One marker per site: circles for raw points, squares with a green
    outline for points reflected across the diagonal (EASB only)."""
    points = [balance_point(s) for s in sites]
    if partition.method == "easb":
        frozen = set(partition.frozen)
        active = symmetric_transform([p for p in points if p.site_id not in frozen])
        moved = {p.site_id: p for p in active}
        points = [moved.get(p.site_id, p) for p in points]
    color = {}
    for c in partition.clusters:
        for m in c.members:
            color[m] = PALETTE[c.id % len(PALETTE)]

    lo, hi = _px(0), _px(1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<line x1="{lo}" y1="{_py(0)}" x2="{hi}" y2="{_py(0)}" stroke="black"/>',
        f'<line x1="{lo}" y1="{_py(0)}" x2="{lo}" y2="{_py(1)}" stroke="black"/>',
        f'<line x1="{lo}" y1="{_py(0)}" x2="{hi}" y2="{_py(1)}" stroke="#cccccc" '
        f'stroke-dasharray="4 4"/>',
    ]
    for t in range(0, 101, 20):
        v = t / 100
        parts.append(f'<text x="{_px(v)}" y="{_py(0) + 16}" font-size="10" '
                     f'text-anchor="middle">{t}</text>')
        parts.append(f'<text x="{lo - 8}" y="{_py(v) + 3}" font-size="10" '
                     f'text-anchor="end">{t}</text>')
    parts.append(f'<text x="{SIZE / 2}" y="{SIZE - 15}" font-size="12" '
                 f'text-anchor="middle">Gender entropy (%)</text>')
    parts.append(f'<text x="15" y="{SIZE / 2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 15 {SIZE / 2})">Age entropy (%)</text>')
    if title:
        parts.append(f'<text x="{SIZE / 2}" y="25" font-size="14" '
                     f'text-anchor="middle">{escape(title)}</text>')

    for p in points:
        x, y = _px(p.x), _py(p.y)
        fill = color.get(p.site_id, "black")
        sid = escape(p.site_id, {'"': "&quot;"})
        if p.transformed:
            parts.append(f'<rect class="marker" data-site="{sid}" x="{x - 6:.2f}" '
                         f'y="{y - 6:.2f}" width="12" height="12" fill="{fill}" '
                         f'stroke="{TRANSFORMED}" stroke-width="3"/>')
        else:
            parts.append(f'<circle class="marker" data-site="{sid}" cx="{x:.2f}" '
                         f'cy="{y:.2f}" r="6" fill="{fill}" stroke="black"/>')
        parts.append(f'<text x="{x + 9:.2f}" y="{y - 7:.2f}" font-size="10">{escape(p.site_id)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
