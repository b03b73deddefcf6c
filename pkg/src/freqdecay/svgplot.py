"""Minimal self-contained SVG line charts (fixed 800x600 viewport).

Presentation only: nothing here feeds back into computation.  Output is
deterministic for fixed inputs.
"""

from __future__ import annotations

import numpy as np

_W, _H = 800, 600
_ML, _MR, _MT, _MB = 70, 20, 40, 50
_COLORS = ("#1f6fb2", "#c44e52", "#2a9d5c", "#8172b3", "#937860", "#dd8452")


def _fmt(x):
    return f"{x:.6g}"


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return raw


def line_chart(path, title, xlabel, ylabel, curves):
    """Write an SVG polyline chart.

    curves: list of (label, x array, y array, dashed flag).
    """
    xs = np.concatenate([np.asarray(c[1], dtype=float) for c in curves])
    ys = np.concatenate([np.asarray(c[2], dtype=float) for c in curves])
    finite = np.isfinite(ys)
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = float(ys[finite].min()), float(ys[finite].max())
    if yhi <= ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    def sx(x):
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W//2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
    ]
    # axes and ticks
    parts.append(f'<line x1="{_ML}" y1="{_H-_MB}" x2="{_W-_MR}" y2="{_H-_MB}" '
                 f'stroke="black"/>')
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H-_MB}" '
                 f'stroke="black"/>')
    for t in _ticks(xlo, xhi):
        x = sx(t)
        parts.append(f'<line x1="{_fmt(x)}" y1="{_H-_MB}" x2="{_fmt(x)}" '
                     f'y2="{_H-_MB+5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x)}" y="{_H-_MB+20}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">{_fmt(t)}</text>')
    for t in _ticks(ylo, yhi):
        y = sy(t)
        parts.append(f'<line x1="{_ML-5}" y1="{_fmt(y)}" x2="{_ML}" y2="{_fmt(y)}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_ML-8}" y="{_fmt(y+4)}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif">{_fmt(t)}</text>')
    parts.append(f'<text x="{(_ML+_W-_MR)//2}" y="{_H-12}" text-anchor="middle" '
                 f'font-size="13" font-family="sans-serif">{xlabel}</text>')
    parts.append(f'<text x="18" y="{(_MT+_H-_MB)//2}" text-anchor="middle" '
                 f'font-size="13" font-family="sans-serif" '
                 f'transform="rotate(-90 18 {(_MT+_H-_MB)//2})">{ylabel}</text>')

    for i, (label, cx, cy, dashed) in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}"
                       for x, y in zip(cx, cy) if np.isfinite(y))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.6"{dash}/>')
        ly = _MT + 18 + 16 * i
        parts.append(f'<line x1="{_W-_MR-150}" y1="{ly-4}" x2="{_W-_MR-120}" '
                     f'y2="{ly-4}" stroke="{color}" stroke-width="1.6"{dash}/>')
        parts.append(f'<text x="{_W-_MR-114}" y="{ly}" font-size="12" '
                     f'font-family="sans-serif">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(parts) + "\n")
