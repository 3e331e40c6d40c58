"""Self-contained SVG renderings of persistence diagrams and barcodes."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .persistence import PersistenceDiagramSet

__all__ = ["diagram_svg", "barcode_svg"]

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
W, H, PAD = 400, 400, 40


def _extent(d: PersistenceDiagramSet):
    vals = [v for bars in d for v in bars.ravel().tolist() if math.isfinite(v)]
    if math.isfinite(d.max_scale):
        vals.append(d.max_scale)
    hi = max(vals, default=1.0)
    lo = min(vals + [0.0])
    if hi <= lo:
        hi = lo + 1.0
    return lo, hi


def _header(title, height=H):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{W}" height="{height}" fill="white"/>',
    ]


def _axes(height, lo, hi, xlabel, ylabel):
    out = [
        f'<line x1="{PAD}" y1="{height - PAD}" x2="{W - PAD}" y2="{height - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{height - PAD}" stroke="black"/>',
        f'<text x="{W / 2}" y="{height - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="12" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {height / 2})">{escape(ylabel)}</text>',
        f'<text x="{PAD}" y="{height - PAD + 14}" font-size="10" text-anchor="middle">{lo:.3g}</text>',
        f'<text x="{W - PAD}" y="{height - PAD + 14}" font-size="10" text-anchor="middle">{hi:.3g}</text>',
    ]
    return out


def diagram_svg(d: PersistenceDiagramSet, title="persistence diagram") -> str:
    """Scatter of (birth, death) per dimension with the diagonal.

    Infinite deaths are drawn on a dashed line above the finite range.
    """
    lo, hi = _extent(d)
    top = hi + 0.05 * (hi - lo)
    span = top - lo

    def sx(v):
        return PAD + (v - lo) / span * (W - 2 * PAD)

    def sy(v):
        return H - PAD - (v - lo) / span * (H - 2 * PAD)

    out = _header(title)
    out += _axes(H, lo, top, "birth", "death")
    out.append(f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(top):.2f}" y2="{sy(top):.2f}" stroke="gray"/>')
    has_inf = any(np.any(~np.isfinite(b[:, 1])) for b in d if len(b))
    if has_inf:
        out.append(
            f'<line x1="{PAD}" y1="{sy(top):.2f}" x2="{W - PAD}" y2="{sy(top):.2f}" '
            'stroke="gray" stroke-dasharray="4,3"/>'
        )
    for k, bars in enumerate(d):
        color = COLORS[k % len(COLORS)]
        for a, b in bars.tolist():
            y = top if math.isinf(b) else b
            out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"><title>H{k}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def barcode_svg(d: PersistenceDiagramSet, title="persistence barcode") -> str:
    """Horizontal bars ordered by dimension then birth."""
    lo, hi = _extent(d)
    top = hi + 0.05 * (hi - lo)
    rows = [(k, a, b) for k, bars in enumerate(d) for a, b in sorted(bars.tolist())]
    step = 6
    height = max(H, 2 * PAD + step * (len(rows) + 1))

    def sx(v):
        return PAD + (v - lo) / (top - lo) * (W - 2 * PAD)

    out = _header(title, height)
    out += _axes(height, lo, top, "filtration value", "bars")
    for i, (k, a, b) in enumerate(rows):
        y = PAD + step * (i + 1)
        end = top if math.isinf(b) else b
        color = COLORS[k % len(COLORS)]
        out.append(
            f'<line x1="{sx(a):.2f}" y1="{y}" x2="{sx(end):.2f}" y2="{y}" stroke="{color}" stroke-width="3">'
            f"<title>H{k}</title></line>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
