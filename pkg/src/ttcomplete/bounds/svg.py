from __future__ import annotations

import math
from html import escape
from typing import List, Sequence, Tuple

from .formulas import CurveRow

WIDTH = 640
HEIGHT = 420
MARGIN = 60

SERIES: Tuple[Tuple[str, str], ...] = (
    ("unfolding", "#d8000c"),
    ("tt_finite", "#0070c0"),
    ("tt_unique", "#2e8b57"),
)


def render_svg(rows: Sequence[CurveRow], title: str = "") -> str:
    """Bounds against r as polylines on a log10 y axis."""
    if not rows:
        raise ValueError("No rows to plot")

    rs = [row.r for row in rows]
    ys = [
        math.log10(getattr(row, name).value)
        for row in rows
        for name, _ in SERIES
    ]
    x_lo, x_hi = min(rs), max(rs)
    y_lo, y_hi = math.floor(min(ys)), math.ceil(max(ys))
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1

    def px(r: float) -> float:
        return MARGIN + (r - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (
            HEIGHT - 2 * MARGIN
        )

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle">'
        f"{escape(title)}</text>",
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" '
        'text-anchor="middle">r</text>',
    ]

    for e in range(y_lo, y_hi + 1):
        y = py(e)
        out.append(
            f'<text x="{MARGIN - 8}" y="{y:.1f}" text-anchor="end" '
            f'dominant-baseline="middle">1e{e}</text>'
        )
        out.append(
            f'<line x1="{MARGIN}" y1="{y:.1f}" x2="{WIDTH - MARGIN}" '
            f'y2="{y:.1f}" stroke="#dddddd"/>'
        )

    for r in sorted({x_lo, x_hi}):
        out.append(
            f'<text x="{px(r):.1f}" y="{HEIGHT - MARGIN + 16}" '
            f'text-anchor="middle">{r}</text>'
        )

    for k, (name, color) in enumerate(SERIES):
        pts = " ".join(
            f"{px(row.r):.2f},{py(math.log10(getattr(row, name).value)):.2f}"
            for row in rows
        )
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{pts}"/>'
        )
        ly = MARGIN + 16 * k
        out.append(
            f'<text x="{WIDTH - MARGIN - 4}" y="{ly}" text-anchor="end" '
            f'fill="{color}">{name}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
