"""Dependency-free SVG line and band plots.

The renderer is deliberately small: one panel, linear axes, polylines and a
shaded band polygon. Coordinates are printed with fixed precision so the
output is byte-stable for identical inputs.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import RangeError
from .series import atomic_write_text

WIDTH, HEIGHT = 900, 380
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50

OBSERVED = "#c8c8c8"
TRUTH = "#ff7f0e"
BAND = "#9ecae1"
CENTER = "#1f77b4"
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


class _Panel:
    def __init__(self, x: np.ndarray, ys: list[np.ndarray], title: str, xlabel: str, ylabel: str):
        self.x0, self.x1 = float(np.min(x)), float(np.max(x))
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1
        allv = np.concatenate([np.ravel(y) for y in ys])
        self.y0, self.y1 = float(allv.min()), float(allv.max())
        pad = 0.05 * (self.y1 - self.y0) or 0.5
        self.y0, self.y1 = self.y0 - pad, self.y1 + pad
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        ]
        self._axes(xlabel, ylabel)

    def px(self, x) -> np.ndarray:
        return LEFT + (np.asarray(x, float) - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)

    def py(self, y) -> np.ndarray:
        return HEIGHT - BOTTOM - (np.asarray(y, float) - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)

    def _axes(self, xlabel: str, ylabel: str) -> None:
        p = self.parts
        xb, yb = HEIGHT - BOTTOM, LEFT
        p.append(f'<rect x="{LEFT}" y="{TOP}" width="{WIDTH - LEFT - RIGHT}" '
                 f'height="{HEIGHT - TOP - BOTTOM}" fill="none" stroke="black"/>')
        for v in _nice_ticks(self.x0, self.x1):
            x = float(self.px(v))
            p.append(f'<line x1="{x:.2f}" y1="{xb}" x2="{x:.2f}" y2="{xb + 5}" stroke="black"/>')
            p.append(f'<text x="{x:.2f}" y="{xb + 18}" text-anchor="middle">{v:g}</text>')
        for v in _nice_ticks(self.y0, self.y1):
            y = float(self.py(v))
            p.append(f'<line x1="{yb - 5}" y1="{y:.2f}" x2="{yb}" y2="{y:.2f}" stroke="black"/>')
            p.append(f'<text x="{yb - 8}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
        p.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
        p.append(f'<text transform="translate(16 {HEIGHT / 2:.0f}) rotate(-90)" '
                 f'text-anchor="middle">{escape(ylabel)}</text>')

    def line(self, x, y, color: str, width: float = 1.2) -> None:
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(self.px(x), self.py(y)))
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def band(self, x, lower, upper, color: str) -> None:
        upper = np.maximum(upper, lower)
        xs = np.concatenate([self.px(x), self.px(x)[::-1]])
        ys = np.concatenate([self.py(upper), self.py(lower)[::-1]])
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
        self.parts.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="0.6" stroke="none"/>')

    def legend(self, entries: list[tuple[str, str]]) -> None:
        y = TOP + 14
        for label, color in entries:
            x = WIDTH - RIGHT - 150
            self.parts.append(f'<rect x="{x}" y="{y - 9}" width="14" height="10" fill="{color}"/>')
            self.parts.append(f'<text x="{x + 20}" y="{y}">{escape(label)}</text>')
            y += 15

    def svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def check_window(window: tuple[int, int], start: int, length: int) -> tuple[int, int]:
    a, b = int(window[0]), int(window[1])
    last = start + length - 1
    if not (start <= a <= b <= last):
        raise RangeError(f"plot window ({a}, {b}) is outside [{start}, {last}]", "plot_windows")
    return a - start, b - start + 1


def timeseries_svg(
    times, observed, truth, lower, upper, center=None, *, window=None, title: str = "VBPBB band"
) -> str:
    """Observed series (light), truth (highlight) and shaded band over ``window``."""
    times = np.asarray(times)
    lo_i, hi_i = (0, times.size) if window is None else check_window(window, int(times[0]), times.size)
    sl = slice(lo_i, hi_i)
    x = times[sl]
    arrays = [np.asarray(a)[sl] for a in (observed, truth, lower, upper)]
    panel = _Panel(x, arrays, title, "t", "value")
    panel.line(x, arrays[0], OBSERVED, 0.8)
    panel.band(x, arrays[2], arrays[3], BAND)
    if center is not None:
        panel.line(x, np.asarray(center)[sl], CENTER, 1.0)
    panel.line(x, arrays[1], TRUTH, 1.6)
    entries = [("observed", OBSERVED), ("truth", TRUTH), ("band", BAND)]
    if center is not None:
        entries.append(("band center", CENTER))
    panel.legend(entries)
    return panel.svg()


def bias_svg(curves: dict[str, np.ndarray], title: str = "Bias per period") -> str:
    """One labelled curve per scenario against cycle position ``k = 1..P``."""
    if not curves:
        raise ValueError("no bias curves to plot")
    arrays = {k: np.asarray(v, float) for k, v in curves.items()}
    p = max(a.size for a in arrays.values())
    k = np.arange(1, p + 1)
    panel = _Panel(k, [*arrays.values(), np.zeros(1)], title, "position k", "bias")
    panel.line(k, np.zeros(p), "#888888", 0.6)
    entries = []
    for i, (label, a) in enumerate(arrays.items()):
        color = PALETTE[i % len(PALETTE)]
        panel.line(np.arange(1, a.size + 1), a, color, 1.5)
        entries.append((label, color))
    panel.legend(entries)
    return panel.svg()


def write_svg(path, svg: str) -> Path:
    return atomic_write_text(path, svg)
