"""Minimal static SVG line charts (log-log axes, no external dependencies)."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

WIDTH, HEIGHT, PAD = 640, 400, 56
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _log_range(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = math.log10(min(values)), math.log10(max(values))
    if hi - lo < 1e-9:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def line_chart(series: dict[str, tuple[Sequence[float], Sequence[float]]], title: str,
               xlabel: str = "t", ylabel: str = "") -> str:
    """Render named (x, y) series on log-log axes; non-positive points are dropped."""
    clean = {}
    for name, (xs, ys) in series.items():
        pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0 and math.isfinite(y)]
        if len(pts) >= 2:
            clean[name] = pts
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    if not clean:
        out.append("</svg>")
        return "\n".join(out)
    x0, x1 = _log_range([x for pts in clean.values() for x, _ in pts])
    y0, y1 = _log_range([y for pts in clean.values() for _, y in pts])

    def sx(x: float) -> float:
        return PAD + (math.log10(x) - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def sy(y: float) -> float:
        return HEIGHT - PAD - (math.log10(y) - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    out.append(f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}" '
               f'fill="none" stroke="black"/>')
    for k in range(math.ceil(x0), math.floor(x1) + 1):
        out.append(f'<text x="{sx(10.0**k):.1f}" y="{HEIGHT - PAD + 16}" text-anchor="middle">1e{k}</text>')
    for k in range(math.ceil(y0), math.floor(y1) + 1):
        out.append(f'<text x="{PAD - 6}" y="{sy(10.0**k) + 4:.1f}" text-anchor="end">1e{k}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2}" transform="rotate(-90 14 {HEIGHT / 2})" '
               f'text-anchor="middle">{ylabel}</text>')
    for i, (name, pts) in enumerate(clean.items()):
        color = COLORS[i % len(COLORS)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{PAD + 8}" y="{PAD + 16 + 14 * i}" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out)


def write_chart(path: Path, *args, **kwargs) -> None:
    Path(path).write_text(line_chart(*args, **kwargs) + "\n")
