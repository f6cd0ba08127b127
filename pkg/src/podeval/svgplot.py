"""POD curve plots written directly as SVG markup."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["render_pod_svg", "nice_ticks"]

WIDTH = 640
HEIGHT = 420
MARGIN = {"left": 70, "right": 30, "top": 40, "bottom": 60}


def _escape(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _sig9(values):
    # the same rounding the curve CSV uses, so a re-read CSV draws identically
    return np.array([float(f"{v:.9g}") for v in np.asarray(values, dtype=float)])


def nice_ticks(lo, hi, target=6):
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10) + 0.0)
        v += step
    return ticks


def render_pod_svg(a, pod_mean, pod_lower, points=None, a90=None, a90_95=None,
                   title="POD", x_label="a"):
    """SVG text with the mean POD curve, its lower bound and optional hit/miss points.

    ``points`` is ``(a, fraction_detected)``; vertical markers are drawn at
    ``a90`` and ``a90_95`` when given.
    """
    a, mean, lower = _sig9(a), _sig9(pod_mean), _sig9(pod_lower)
    x_lo, x_hi = float(a.min()), float(a.max())
    if points is not None:
        pa = np.asarray(points[0], dtype=float)
        x_lo, x_hi = min(x_lo, float(pa.min())), max(x_hi, float(pa.max()))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    left, top = MARGIN["left"], MARGIN["top"]
    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return left + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return top + (1.0 - v) * plot_h

    def polyline(xs, ys):
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{_escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for tick in nice_ticks(x_lo, x_hi):
        x = sx(tick)
        out.append(f'<line x1="{x:.2f}" y1="{top + plot_h}" x2="{x:.2f}" y2="{top + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + plot_h + 18}" text-anchor="middle">{tick:g}</text>')
    for tick in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = sy(tick)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{tick:g}</text>')
    out.append(f'<line x1="{left}" y1="{sy(0.9):.2f}" x2="{left + plot_w}" y2="{sy(0.9):.2f}" '
               'stroke="#999999" stroke-dasharray="2,3"/>')
    out.append(f'<text x="{left + plot_w / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{_escape(x_label)}</text>')
    out.append(f'<text x="18" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">POD</text>')
    if points is not None:
        for px, py in zip(np.asarray(points[0], dtype=float), np.asarray(points[1], dtype=float)):
            out.append(f'<circle class="hitmiss" cx="{sx(px):.2f}" cy="{sy(py):.2f}" r="2.5" '
                       'fill="none" stroke="#555555"/>')
    out.append(f'<polyline class="pod-mean" points="{polyline(a, mean)}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    out.append(f'<polyline class="pod-lower95" points="{polyline(a, lower)}" fill="none" '
               'stroke="#d62728" stroke-width="1.5" stroke-dasharray="6,4"/>')
    for value, label, color in ((a90, "a90", "#1f77b4"), (a90_95, "a90/95", "#d62728")):
        if value is None:
            continue
        x = sx(float(f"{value:.9g}"))
        out.append(f'<line class="marker" x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + plot_h}" '
                   f'stroke="{color}" stroke-dasharray="3,3"/>')
        out.append(f'<text x="{x + 4:.2f}" y="{top + 14}" fill="{color}">{label} = {value:.4g}</text>')
    legend_y = top + plot_h - 40
    out.append(f'<line x1="{left + plot_w - 150}" y1="{legend_y}" x2="{left + plot_w - 120}" y2="{legend_y}" '
               'stroke="#1f77b4" stroke-width="2"/>')
    out.append(f'<text x="{left + plot_w - 115}" y="{legend_y + 4}">mean POD</text>')
    out.append(f'<line x1="{left + plot_w - 150}" y1="{legend_y + 18}" x2="{left + plot_w - 120}" '
               f'y2="{legend_y + 18}" stroke="#d62728" stroke-dasharray="6,4"/>')
    out.append(f'<text x="{left + plot_w - 115}" y="{legend_y + 22}">95% lower bound</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
