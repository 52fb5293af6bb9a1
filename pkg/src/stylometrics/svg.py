"""Dependency-free SVG charts with fixed numeric formatting (byte-stable output)."""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 440
MARGIN = dict(left=70, right=150, top=40, bottom=55)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _f(x: float) -> str:
    return f"{x:.6f}"


def _range(values: Sequence[float]) -> tuple[float, float]:
    vals = [v for v in values if math.isfinite(v)]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


class _Frame:
    def __init__(self, xs, ys, title, xlabel, ylabel):
        self.x0, self.x1 = _range(xs)
        self.y0, self.y1 = _range(ys)
        self.pw = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
            f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{self.pw}" height="{self.ph}" '
            f'fill="none" stroke="black"/>',
            f'<text x="{MARGIN["left"] + self.pw / 2}" y="{HEIGHT - 12}" '
            f'text-anchor="middle">{escape(xlabel)}</text>',
            f'<text x="16" y="{MARGIN["top"] + self.ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {MARGIN["top"] + self.ph / 2})">{escape(ylabel)}</text>',
        ]
        for i in range(5):
            fx = self.x0 + (self.x1 - self.x0) * i / 4
            fy = self.y0 + (self.y1 - self.y0) * i / 4
            self.parts.append(f'<text x="{_f(self.px(fx))}" y="{MARGIN["top"] + self.ph + 16}" '
                              f'text-anchor="middle">{fx:.3g}</text>')
            self.parts.append(f'<text x="{MARGIN["left"] - 6}" y="{_f(self.py(fy) + 4)}" '
                              f'text-anchor="end">{fy:.3g}</text>')

    def px(self, x):
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y):
        return MARGIN["top"] + self.ph - (y - self.y0) / (self.y1 - self.y0) * self.ph

    def legend(self, names):
        for i, name in enumerate(names):
            y = MARGIN["top"] + 12 + 16 * i
            x = WIDTH - MARGIN["right"] + 10
            self.parts.append(f'<rect x="{x}" y="{y - 8}" width="10" height="10" '
                              f'fill="{PALETTE[i % len(PALETTE)]}"/>')
            self.parts.append(f'<text x="{x + 14}" y="{y + 1}">{escape(str(name))}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def scatter(groups: Mapping[str, Sequence[tuple[float, float, str]]], title: str,
            xlabel: str, ylabel: str) -> str:
    """Grouped scatter plot; each point is ``(x, y, label)`` (label may be empty)."""
    pts = [p for g in groups.values() for p in g]
    fr = _Frame([p[0] for p in pts], [p[1] for p in pts], title, xlabel, ylabel)
    for i, (name, g) in enumerate(groups.items()):
        color = PALETTE[i % len(PALETTE)]
        for x, y, label in g:
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            fr.parts.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="4" fill="{color}"/>')
            if label:
                fr.parts.append(f'<text x="{_f(fr.px(x) + 6)}" y="{_f(fr.py(y) - 4)}" '
                                f'font-size="9">{escape(label)}</text>')
    fr.legend(list(groups))
    return fr.render()


def lines(series: Mapping[str, Sequence[tuple[float, float]]], title: str, xlabel: str,
          ylabel: str, step: bool = False) -> str:
    """Line (or step) chart, one polyline per series."""
    pts = [p for s in series.values() for p in s]
    fr = _Frame([p[0] for p in pts], [p[1] for p in pts], title, xlabel, ylabel)
    for i, (name, s) in enumerate(series.items()):
        coords = []
        prev = None
        for x, y in s:
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if step and prev is not None:
                coords.append(f"{_f(fr.px(x))},{_f(fr.py(prev))}")
            coords.append(f"{_f(fr.px(x))},{_f(fr.py(y))}")
            prev = y
        fr.parts.append(f'<polyline fill="none" stroke="{PALETTE[i % len(PALETTE)]}" '
                        f'stroke-width="1.5" points="{" ".join(coords)}"/>')
    fr.legend(list(series))
    return fr.render()
