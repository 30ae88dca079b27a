"""Minimal self-contained SVG line charts for sweep results.

CSV is the canonical output; these charts are a reading aid. The writer
emits plain SVG 1.1 text with no external assets, so the files render
anywhere and diff cleanly between runs.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

Series = tuple[str, list[tuple[float, float]]]

WIDTH = 760
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 210
MARGIN_TOP = 46
MARGIN_BOTTOM = 56
N_TICKS = 5

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
    "#e377c2",
    "#aec7e8",
    "#98df8a",
)


def _span(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        # Degenerate axis: pad symmetrically so the point sits centered.
        return lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(value: float) -> str:
    return format(value, ".6g")


def line_chart(series: list[Series], title: str, x_label: str, y_label: str) -> str:
    """Render one chart as an SVG document string.

    Each series is a legend label plus ``(x, y)`` points; points are drawn
    in the order given. Raises ValueError when there is nothing to draw.
    """
    if not series or all(not points for _, points in series):
        raise ValueError("line_chart needs at least one non-empty series")
    xs = [x for _, points in series for x, _ in points]
    ys = [y for _, points in series for _, y in points]
    x_lo, x_hi = _span(xs)
    y_lo, y_hi = _span(ys + [0.0])
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15" font-weight="bold">{escape(title)}</text>',
    ]
    # Axes box and tick grid.
    parts.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for i in range(N_TICKS):
        frac = i / (N_TICKS - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        xp, yp = px(xv), py(yv)
        parts.append(
            f'<line x1="{xp:.2f}" y1="{MARGIN_TOP}" x2="{xp:.2f}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#ddd" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{yp:.2f}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{yp:.2f}" stroke="#ddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{xp:.2f}" y="{MARGIN_TOP + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(xv)}</text>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{yp + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(yv)}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )
    # Series polylines, markers, and the legend column.
    legend_x = MARGIN_LEFT + plot_w + 16
    for idx, (label, points) in enumerate(series):
        if not points:
            continue
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in points)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for x, y in points:
            parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.6" fill="{color}"/>')
        ly = MARGIN_TOP + 10 + 18 * idx
        parts.append(
            f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 28}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_chart(
    path: str | Path, series: list[Series], title: str, x_label: str, y_label: str
) -> Path:
    """Write a chart to disk and return its path."""
    target = Path(path)
    target.write_text(line_chart(series, title, x_label, y_label), encoding="utf-8")
    return target
