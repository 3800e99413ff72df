"""Self-contained two-panel SVG: envelope with constituents (top) and log-slope (bottom)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from . import __version__

W, H = 720, 640
PAD_L, PAD_R, PAD_T, PAD_B = 70, 20, 30, 40
PANEL_GAP = 60
COLORS = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _fmt(v):
    return f"{v:.2f}"


class _Panel:
    def __init__(self, top, height, xr, yr):
        self.top, self.height = top, height
        self.x0, self.x1 = xr
        self.y0, self.y1 = yr
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1

    def sx(self, x):
        return PAD_L + (x - self.x0) / (self.x1 - self.x0) * (W - PAD_L - PAD_R)

    def sy(self, y):
        return self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height

    def polyline(self, pts, color, width=1.0, dash=None):
        pts = [(x, y) for x, y in pts if math.isfinite(x) and math.isfinite(y)]
        if len(pts) < 2:
            return ""
        d = " ".join(f"{_fmt(self.sx(x))},{_fmt(self.sy(y))}" for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{d}"/>'

    def frame(self, xlabel, ylabel, yticks):
        out = [
            f'<rect x="{PAD_L}" y="{self.top}" width="{W - PAD_L - PAD_R}" height="{self.height}" '
            'fill="none" stroke="#000"/>'
        ]
        for e in range(math.ceil(self.x0), math.floor(self.x1) + 1):
            x = _fmt(self.sx(e))
            out.append(f'<line x1="{x}" x2="{x}" y1="{self.top + self.height}" y2="{self.top + self.height + 4}" stroke="#000"/>')
            out.append(f'<text x="{x}" y="{self.top + self.height + 16}" font-size="10" text-anchor="middle">1e{e}</text>')
        for v, label in yticks:
            y = _fmt(self.sy(v))
            out.append(f'<line x1="{PAD_L - 4}" x2="{PAD_L}" y1="{y}" y2="{y}" stroke="#000"/>')
            out.append(f'<text x="{PAD_L - 6}" y="{y}" font-size="10" text-anchor="end" dominant-baseline="middle">{label}</text>')
        out.append(f'<text x="{(W + PAD_L) / 2}" y="{self.top + self.height + 32}" font-size="11" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(
            f'<text x="14" y="{self.top + self.height / 2}" font-size="11" text-anchor="middle" '
            f'transform="rotate(-90 14 {self.top + self.height / 2})">{escape(ylabel)}</text>'
        )
        return "\n".join(out)


def render(title, envelope, constituents, slopes, breakpoints=()):
    """envelope: [(r, B)], constituents: {q: [(r, u)]}, slopes: [(r, slope)]; r > 0 throughout.

    Both panels use log10 r on the horizontal axis; the top panel also uses log10 of the value.
    """
    env = [(math.log10(r), math.log10(b)) for r, b in envelope if r > 0 and b > 0]
    xs = [p[0] for p in env]
    ys = [p[1] for p in env]
    h = (H - PAD_T - PAD_B - PANEL_GAP) / 2
    top = _Panel(PAD_T, h * 1.1, (min(xs), max(xs)), (min(ys), max(ys) + 0.1))
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- margulis {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="#fff"/>',
        f'<text x="{W / 2}" y="18" font-size="13" text-anchor="middle">{escape(title)}</text>',
    ]
    yt = [(e, f"1e{e}") for e in range(math.ceil(top.y0), math.floor(top.y1) + 1)]
    parts.append(top.frame("r", "boundary value", yt))
    for i, (q, pts) in enumerate(sorted(constituents.items())):
        lp = [(math.log10(r), math.log10(u)) for r, u in pts if r > 0 and u > 0]
        lp = [(x, min(y, top.y1)) for x, y in lp if top.x0 <= x <= top.x1]
        parts.append(top.polyline(lp, COLORS[i % len(COLORS)], 0.8, "4,3"))
    parts.append(top.polyline(env, "#d62728", 1.8))
    for r in breakpoints:
        if r > 0 and top.x0 <= math.log10(r) <= top.x1:
            x = _fmt(top.sx(math.log10(r)))
            parts.append(f'<line x1="{x}" x2="{x}" y1="{top.top}" y2="{top.top + top.height}" stroke="#ccc" stroke-width="0.5"/>')
    sl = [(math.log10(r), s) for r, s in slopes if r > 1]
    if sl:
        svals = [s for _, s in sl]
        bottom = _Panel(PAD_T + top.height + PANEL_GAP, h * 0.9, (top.x0, top.x1), (min(0.0, min(svals)), max(1.0, max(svals))))
        ticks = [(v / 4, f"{v / 4:.2f}") for v in range(0, 5)]
        parts.append(bottom.frame("r", "log B / log r", ticks))
        parts.append(bottom.polyline([(top.x0, 0.5), (top.x1, 0.5)], "#999", 0.8, "2,2"))
        parts.append(bottom.polyline(sl, "#d62728", 1.5))
    parts.append("</svg>")
    return "\n".join(p for p in parts if p) + "\n"
