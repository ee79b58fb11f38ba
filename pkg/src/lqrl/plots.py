"""Static SVG figures from trajectory logs, written without a plotting backend."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .trajectory import TrajectoryLog

WIDTH = 800
PANEL_HEIGHT = 240
PAD_LEFT, PAD_RIGHT, PAD_TOP, PAD_BOTTOM = 80, 30, 35, 40
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e")


def _bounds(values):
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return -1.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        span = abs(lo) if lo else 1.0
        return lo - 0.5 * span, hi + 0.5 * span
    return lo, hi


def _panel(title, x, series, y_label, top, x_label="t (s)") -> list[str]:
    """SVG elements for one panel; ``series`` is a list of ``(label, values)``."""
    plot_w = WIDTH - PAD_LEFT - PAD_RIGHT
    plot_h = PANEL_HEIGHT - PAD_TOP - PAD_BOTTOM
    x0, x1 = _bounds(x)
    y0, y1 = _bounds([v for _, vals in series for v in vals])

    def sx(v):
        return PAD_LEFT + (v - x0) / (x1 - x0) * plot_w

    def sy(v):
        return top + PAD_TOP + plot_h - (v - y0) / (y1 - y0) * plot_h

    left, right = PAD_LEFT, PAD_LEFT + plot_w
    bottom = top + PAD_TOP + plot_h
    out = [
        '<g class="panel">',
        f'<text x="{WIDTH / 2:.1f}" y="{top + 22}" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<rect x="{left}" y="{top + PAD_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>',
    ]
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(fx):.1f}" y="{bottom + 16}" text-anchor="middle" font-size="11">{fx:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(fy) + 4:.1f}" text-anchor="end" font-size="11">{fy:.3g}</text>')
        out.append(
            f'<line x1="{left}" y1="{sy(fy):.1f}" x2="{right}" y2="{sy(fy):.1f}" stroke="#ddd" stroke-width="0.5"/>'
        )
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{sy(0):.1f}" x2="{right}" y2="{sy(0):.1f}" stroke="#888" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{(left + right) / 2:.1f}" y="{bottom + 34}" text-anchor="middle" font-size="12">{escape(x_label)}</text>')
    ly = top + PAD_TOP + plot_h / 2
    out.append(
        f'<text x="18" y="{ly:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 18 {ly:.1f})">'
        f"{escape(y_label)}</text>"
    )
    for idx, (label, vals) in enumerate(series):
        color = COLORS[idx % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, vals) if math.isfinite(b))
        out.append(
            f'<polyline data-series="{escape(label)}" fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        lx = right - 120
        lyy = top + PAD_TOP + 14 + 16 * idx
        out.append(f'<line x1="{lx}" y1="{lyy - 4}" x2="{lx + 20}" y2="{lyy - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{lyy}" font-size="12">{escape(label)}</text>')
    out.append("</g>")
    return out


def simulation_svg(traj: TrajectoryLog) -> str:
    """Three stacked panels: spacing error, velocities, Lyapunov derivative."""
    panels = [
        ("Spacing error", [("z", traj.z)], "z (m)"),
        ("Relative and ego velocity", [("v_r", traj.v_r), ("v_e", traj.v_e)], "velocity (m/s)"),
        ("Lyapunov derivative", [("dV/dt", traj.Vdot)], "dV/dt"),
    ]
    height = PANEL_HEIGHT * len(panels)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    for i, (title, series, label) in enumerate(panels):
        parts += _panel(title, traj.t, series, label, i * PANEL_HEIGHT)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def history_svg(history: list[float]) -> str:
    """Single panel of the per-episode training objective."""
    x = [float(i + 1) for i in range(len(history))]
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{PANEL_HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {PANEL_HEIGHT}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{PANEL_HEIGHT}" fill="white"/>',
    ]
    parts += _panel("Training objective per episode", x, [("J", history)], "objective", 0, x_label="episode")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_simulation_svg(traj: TrajectoryLog, path: str | Path) -> None:
    Path(path).write_text(simulation_svg(traj), encoding="utf-8")


def write_history_svg(history: list[float], path: str | Path) -> None:
    Path(path).write_text(history_svg(history), encoding="utf-8")
