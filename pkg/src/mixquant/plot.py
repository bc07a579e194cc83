"""Minimal SVG renderings: codebooks stacked by n, and the step density."""

from __future__ import annotations

from typing import Sequence

from .density import StepDensity

WIDTH = 800.0
MARGIN = 40.0
ROW = 30.0


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _xmap(x: float, lo: float, hi: float) -> float:
    return MARGIN + (x - lo) / (hi - lo) * (WIDTH - 2 * MARGIN)


def codepoints_svg(codebooks: Sequence[Sequence[float]], support=(0.0, 1.5)) -> str:
    """Row ``i`` (bottom to top) shows the codebook for ``n = i + 1``."""
    lo, hi = support
    height = 2 * MARGIN + ROW * len(codebooks)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(WIDTH)}" height="{_fmt(height)}">',
        f'<line x1="{_fmt(_xmap(lo, lo, hi))}" y1="{_fmt(height - MARGIN)}" '
        f'x2="{_fmt(_xmap(hi, lo, hi))}" y2="{_fmt(height - MARGIN)}" stroke="black"/>',
    ]
    for i, cb in enumerate(codebooks):
        y = height - MARGIN - ROW * (i + 1)
        out.append(f'<text x="{_fmt(MARGIN / 4)}" y="{_fmt(y + 4)}" font-size="12">n={i + 1}</text>')
        out.append(f'<g class="n{i + 1}">')
        for a in cb:
            out.append(f'<circle cx="{_fmt(_xmap(a, lo, hi))}" cy="{_fmt(y)}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def density_svg(d: StepDensity, height: float = 300.0) -> str:
    lo, hi = d.support
    top = max(d.levels)
    span = height - 2 * MARGIN

    def ymap(v: float) -> float:
        return height - MARGIN - v / top * span * 0.9

    pts = [(lo, 0.0)]
    for t, a, b in d.pieces():
        pts += [(a, t), (b, t)]
    pts.append((hi, 0.0))
    path = " ".join(f"{_fmt(_xmap(x, lo, hi))},{_fmt(ymap(v))}" for x, v in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(WIDTH)}" height="{_fmt(height)}">\n'
        f'<polyline class="density" points="{path}" fill="none" stroke="black"/>\n'
        "</svg>\n"
    )
