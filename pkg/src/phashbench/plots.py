"""Small self-contained SVG charts: lattice histograms and threshold curves.

Coordinates are printed with fixed precision, so identical data always
gives identical bytes.
"""
from __future__ import annotations

from html import escape

import numpy as np

W, H = 640, 400
ML, MR, MT, MB = 60, 20, 36, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    def __init__(self, x0, x1, y0, y1):
        self.x0, self.x1 = x0, x1
        self.y0, self.y1 = y0, (y1 if y1 > y0 else y0 + 1)

    def x(self, v):
        return ML + (v - self.x0) / (self.x1 - self.x0) * (W - ML - MR)

    def y(self, v):
        return H - MB - (v - self.y0) / (self.y1 - self.y0) * (H - MT - MB)


def _axes(fr: _Frame, title: str, xlabel: str, ylabel: str, xticks, yticks) -> list:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.0f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
        f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>',
    ]
    for t in xticks:
        x = _f(fr.x(t))
        out.append(f'<line x1="{x}" y1="{H - MB}" x2="{x}" y2="{H - MB + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{H - MB + 16}" text-anchor="middle">{t:.2f}</text>')
    for t in yticks:
        y = _f(fr.y(t))
        out.append(f'<line x1="{ML - 4}" y1="{y}" x2="{ML}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{ML - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">{t:.3g}</text>')
    out.append(f'<text x="{(ML + W - MR) / 2:.0f}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{(MT + H - MB) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(MT + H - MB) / 2:.0f})">{escape(ylabel)}</text>')
    return out


def _ticks(lo, hi, n=5):
    return list(np.linspace(lo, hi, n))


def histogram_svg(title: str, bitlen: int, ks, counts, npdf=None) -> str:
    """Density bars, one per lattice point, with an optional normal overlay."""
    ks = np.asarray(ks)
    counts = np.asarray(counts, dtype=np.float64)
    width = 1.0 / bitlen
    density = counts / (counts.sum() * width)
    top = density.max()
    if npdf is not None:
        top = max(top, float(np.max(npdf)))
    fr = _Frame(0.0, 1.0, 0.0, top * 1.05)
    out = _axes(fr, title, "normalised Hamming distance", "density", _ticks(0, 1), _ticks(0, top))
    for k, d in zip(ks, density):
        x0, x1 = fr.x((k - 0.5) * width), fr.x((k + 0.5) * width)
        out.append(f'<rect x="{_f(x0)}" y="{_f(fr.y(d))}" width="{_f(x1 - x0)}" '
                   f'height="{_f(fr.y(0) - fr.y(d))}" fill="{PALETTE[0]}" fill-opacity="0.6"/>')
    if npdf is not None:
        pts = " ".join(f"{_f(fr.x(k * width))},{_f(fr.y(v))}" for k, v in zip(ks, npdf))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[1]}" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curves_svg(title: str, x, series: dict, ylabel: str = "rate") -> str:
    """Step-free polylines over shared x values; ``series`` maps label to y values."""
    fr = _Frame(0.0, 1.0, 0.0, 1.0)
    out = _axes(fr, title, "threshold distance", ylabel, _ticks(0, 1), _ticks(0, 1))
    for i, (label, ys) in enumerate(series.items()):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(fr.x(a))},{_f(fr.y(b))}" for a, b in zip(x, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        ly = MT + 14 * i + 6
        out.append(f'<line x1="{W - MR - 130}" y1="{ly}" x2="{W - MR - 110}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{W - MR - 105}" y="{ly}" dominant-baseline="middle">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
