"""Hand-assembled SVG figures: formation-energy envelopes and normalized CTLs.

Canvas is fixed at 800x600 with margins left 80, right 120, top 40, bottom 60;
coordinates are written with two decimals so output is byte-stable.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 80, "right": 120, "top": 40, "bottom": 60}
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
)


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


class _Frame:
    def __init__(self, x0, x1, y0, y1):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list:
    span = hi - lo
    raw = span / max(n, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * span:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _header(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]


def _axes(fr: _Frame, xlabel: str, ylabel: str, xticks, yticks) -> list:
    out = [
        f'<g id="axes" stroke="#000000" stroke-width="1" fill="none">',
        f'<rect x="{_f(fr.left)}" y="{_f(fr.top)}" width="{_f(fr.right - fr.left)}" '
        f'height="{_f(fr.bottom - fr.top)}"/>',
    ]
    for t in xticks:
        x = fr.px(t)
        out.append(f'<line x1="{_f(x)}" y1="{_f(fr.bottom)}" x2="{_f(x)}" y2="{_f(fr.bottom + 5)}"/>')
    for t in yticks:
        y = fr.py(t)
        out.append(f'<line x1="{_f(fr.left - 5)}" y1="{_f(y)}" x2="{_f(fr.left)}" y2="{_f(y)}"/>')
    out.append("</g>")
    out.append('<g id="tick-labels" font-family="sans-serif" font-size="12" fill="#000000">')
    for t in xticks:
        out.append(f'<text x="{_f(fr.px(t))}" y="{_f(fr.bottom + 20)}" text-anchor="middle">{t:g}</text>')
    for t in yticks:
        out.append(f'<text x="{_f(fr.left - 8)}" y="{_f(fr.py(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append("</g>")
    cx = (fr.left + fr.right) / 2
    cy = (fr.top + fr.bottom) / 2
    out.append(
        f'<text x="{_f(cx)}" y="{_f(HEIGHT - 15)}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{_f(cy)}" font-family="sans-serif" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 20 {_f(cy)})">{escape(ylabel)}</text>'
    )
    return out


def envelope_svg(polylines, E_gap: float, title: str = "Formation energy") -> str:
    """One polyline per defect (from ``thermo.diagram_data``) with kink markers."""
    polylines = list(polylines)
    if not polylines:
        raise ValueError("nothing to draw")
    ys = [v[1] for p in polylines for v in p.vertices]
    y0, y1 = min(ys), max(ys)
    pad = 0.05 * (y1 - y0 or 1.0)
    fr = _Frame(0.0, E_gap, y0 - pad, y1 + pad)
    out = _header(title)
    out += _axes(fr, "Fermi level above VBM (eV)", "Formation energy (eV)",
                 _nice_ticks(0.0, E_gap), _nice_ticks(fr.y0, fr.y1))
    for i, p in enumerate(polylines):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(fr.px(x))},{_f(fr.py(y))}" for x, y in p.vertices)
        out.append(f'<g class="defect" data-label="{escape(p.label)}">')
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in p.kinks:
            out.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="3.5" fill="{color}"/>')
        ex, ey = p.vertices[-1]
        out.append(
            f'<text x="{_f(fr.right + 6)}" y="{_f(fr.py(ey) + 4)}" font-family="sans-serif" '
            f'font-size="12" fill="{color}">{escape(p.label)}</text>'
        )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def normalized_ctl_svg(levels: dict, title: str = "Normalized charge transition levels") -> str:
    """Horizontal bars at E_CTL / E_gap, one column per defect.

    Args:
        levels: label -> list of (notation, normalized value) pairs.
    """
    labels = sorted(levels)
    if not labels:
        raise ValueError("nothing to draw")
    n = len(labels)
    fr = _Frame(0.0, float(n), 0.0, 1.0)
    out = _header(title)
    out += _axes(fr, "Defect", "E_CTL / E_gap", [], _nice_ticks(0.0, 1.0, 5))
    for i, label in enumerate(labels):
        color = PALETTE[i % len(PALETTE)]
        xa, xb = fr.px(i + 0.2), fr.px(i + 0.8)
        out.append(f'<g class="defect" data-label="{escape(label)}">')
        for notation, v in levels[label]:
            y = fr.py(v)
            out.append(f'<line x1="{_f(xa)}" y1="{_f(y)}" x2="{_f(xb)}" y2="{_f(y)}" stroke="{color}" stroke-width="3"/>')
            out.append(
                f'<text x="{_f(xb + 3)}" y="{_f(y + 4)}" font-family="sans-serif" font-size="10" '
                f'fill="{color}">{escape(notation)} {v:.2f}</text>'
            )
        out.append(
            f'<text x="{_f(fr.px(i + 0.5))}" y="{_f(fr.bottom + 20)}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle">{escape(label)}</text>'
        )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
