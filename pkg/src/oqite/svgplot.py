"""Minimal deterministic SVG line charts for trajectory CSVs.

No plotting dependency: the chart is assembled as text with fixed
geometry and ``%.6g`` number formatting, so identical input data gives
byte-identical output.
"""

from __future__ import annotations

import math

from .trajectory import Trajectory

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 16, 20, 46
PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    out = format(float(v), ".6g")
    return "0" if out == "-0" else out


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def render(traj: Trajectory, title: str = "") -> str:
    """Single-panel chart, one polyline per observable series."""
    if not traj.points:
        raise ValueError("trajectory holds no points")
    names = list(traj.points[0].values)
    times = traj.times()
    x_lo, x_hi = float(times.min()), float(times.max())
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    y_lo = min(float(traj.series(n).min()) for n in names)
    y_hi = max(float(traj.series(n).max()) for n in names)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    inner_w = WIDTH - MARGIN_L - MARGIN_R
    inner_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + inner_w * (x - x_lo) / (x_hi - x_lo)

    def sy(y: float) -> float:
        return MARGIN_T + inner_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{inner_w}" '
        f'height="{inner_h}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.6g}" y="14" font-size="12" '
            f'font-family="monospace" text-anchor="middle">{title}</text>'
        )

    for t in _nice_ticks(x_lo, x_hi):
        if not x_lo <= t <= x_hi:
            continue
        x = sx(t)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{MARGIN_T + inner_h}" x2="{_fmt(x)}" '
            f'y2="{MARGIN_T + inner_h + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{MARGIN_T + inner_h + 18}" font-size="10" '
            f'font-family="monospace" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        if not y_lo <= t <= y_hi:
            continue
        y = sy(t)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(y)}" x2="{MARGIN_L}" '
            f'y2="{_fmt(y)}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(y + 3)}" font-size="10" '
            f'font-family="monospace" text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.6g}" y="{HEIGHT - 8}" font-size="11" '
        f'font-family="monospace" text-anchor="middle">t</text>'
    )

    for idx, name in enumerate(names):
        color = PALETTE[idx % len(PALETTE)]
        series = traj.series(name)
        pts = " ".join(
            f"{_fmt(sx(float(t)))},{_fmt(sy(float(v)))}"
            for t, v in zip(times, series)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        if traj.has_std:
            for p in traj.points:
                std = (p.value_std or {}).get(name, 0.0)
                if std <= 0.0:
                    continue
                x = _fmt(sx(p.t))
                parts.append(
                    f'<line x1="{x}" y1="{_fmt(sy(p.values[name] - std))}" '
                    f'x2="{x}" y2="{_fmt(sy(p.values[name] + std))}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
        # legend swatch + label, stacked top-right inside the frame
        ly = MARGIN_T + 14 + 14 * idx
        lx = WIDTH - MARGIN_R - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly}" font-size="10" '
            f'font-family="monospace">{name}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
