"""Minimal SVG 1.1 line plots: a few polylines on shared axes."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def line_plot(series, width: int = 640, height: int = 400, title: str = "",
              margin: int = 40) -> str:
    """Render ``series`` (a list of ``(label, x, y)``) as an SVG document string."""
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, float) for _, _, y in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(min(ys.min(), 0.0)), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    sx = (width - 2 * margin) / (x1 - x0)
    sy = (height - 2 * margin) / (y1 - y0)

    def px(x, y):
        return margin + (x - x0) * sx, height - margin - (y - y0) * sy

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    # axes through the origin when it is in range, else along the frame
    ax_y = 0.0 if y0 <= 0.0 <= y1 else y0
    ax_x = 0.0 if x0 <= 0.0 <= x1 else x0
    a0, a1 = px(x0, ax_y), px(x1, ax_y)
    b0, b1 = px(ax_x, y0), px(ax_x, y1)
    out.append(f'<line x1="{a0[0]:.2f}" y1="{a0[1]:.2f}" x2="{a1[0]:.2f}" y2="{a1[1]:.2f}" '
               'stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{b0[0]:.2f}" y1="{b0[1]:.2f}" x2="{b1[0]:.2f}" y2="{b1[1]:.2f}" '
               'stroke="black" stroke-width="1"/>')
    out.append(f'<text x="{a0[0]:.2f}" y="{a0[1] + 14:.2f}" font-size="11">{x0:.3g}</text>')
    out.append(f'<text x="{a1[0] - 20:.2f}" y="{a1[1] + 14:.2f}" font-size="11">{x1:.3g}</text>')
    if title:
        out.append(f'<text x="{margin}" y="{margin / 2:.0f}" font-size="13">{escape(title)}</text>')
    for k, (label, x, y) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{u:.2f},{v:.2f}" for u, v in (px(float(a), float(b)) for a, b in zip(x, y)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - margin - 150}" y="{margin + 14 * (k + 1)}" '
                   f'font-size="11" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
