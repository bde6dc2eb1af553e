"""Deterministic SVG scatter of (start, end) tuples coloured by cluster."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .model import NOISE

WIDTH = HEIGHT = 480
MARGIN = 50
NOISE_COLOR = "#9e9e9e"
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#393b79",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(points: np.ndarray, labels: Sequence[int], habit_means: Sequence[tuple[float, float]], title: str = "") -> bytes:
    """Points are drawn as circles, NOISE in grey; habit means as crosses."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    labels = np.asarray(labels, dtype=int)
    extent = [points.max() if len(points) else 24.0]
    extent += [max(s, e) for s, e in habit_means]
    top = max(24.0, 6.0 * math.ceil(max(extent) / 6.0))
    span = WIDTH - 2 * MARGIN

    def sx(h):
        return MARGIN + h / top * span

    def sy(h):
        return HEIGHT - MARGIN - h / top * span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}"/>')
    out.append(f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/>')
    out.append("</g>")
    out.append('<g class="ticks" font-size="10">')
    for h in range(0, int(top) + 1, 6):
        clock = f"{h % 24:02d}:00"
        out.append(f'<text x="{_fmt(sx(h))}" y="{HEIGHT - MARGIN + 14}" text-anchor="middle">{clock}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(sy(h) + 3)}" text-anchor="end">{clock}</text>')
    out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">start</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2:.0f}" text-anchor="middle" transform="rotate(-90 14 {HEIGHT / 2:.0f})">end</text>')
    out.append("</g>")

    groups = sorted(set(labels.tolist()), key=lambda c: (c == NOISE, c))
    for c in groups:
        color = NOISE_COLOR if c == NOISE else PALETTE[c % len(PALETTE)]
        name = "noise" if c == NOISE else f"cluster-{c}"
        out.append(f'<g class="points {name}" fill="{color}">')
        for s, e in points[labels == c]:
            out.append(f'<circle cx="{_fmt(sx(s))}" cy="{_fmt(sy(e))}" r="3"/>')
        out.append("</g>")

    out.append('<g class="habits" stroke="black" stroke-width="2">')
    for s, e in habit_means:
        x, y = sx(s), sy(e)
        out.append(f'<path class="cross" d="M{_fmt(x - 6)},{_fmt(y - 6)}L{_fmt(x + 6)},{_fmt(y + 6)}M{_fmt(x - 6)},{_fmt(y + 6)}L{_fmt(x + 6)},{_fmt(y - 6)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
