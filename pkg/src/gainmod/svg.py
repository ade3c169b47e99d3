"""Minimal deterministic SVG plotting: panels, polylines, markers, polar axes."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np


def _f(v):
    return f"{v:.2f}"


def decimate(*arrays, limit=2500):
    n = len(arrays[0])
    if n <= limit:
        return arrays
    idx = np.unique(np.linspace(0, n - 1, limit).round().astype(int))
    return tuple(np.asarray(a)[idx] for a in arrays)


def nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


class Canvas:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.items = []

    def add(self, element):
        self.items.append(element)

    def text(self, x, y, s, size=12, anchor="middle", color="#222", rotate=None):
        rot = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.add(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" '
                 f'fill="{color}" font-family="sans-serif"{rot}>{escape(s)}</text>')

    def to_string(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = "\n".join(self.items)
        return f'{head}\n<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_string())


class Panel:
    """Cartesian axes occupying a rectangle of a canvas."""

    def __init__(self, canvas, x, y, w, h, xlim, ylim, xlabel="", ylabel="", title=""):
        self.c = canvas
        self.x, self.y, self.w, self.h = x, y, w, h
        self.xlim = self._pad(xlim)
        self.ylim = self._pad(ylim)
        self._axes(xlabel, ylabel, title)

    @staticmethod
    def _pad(lim):
        lo, hi = float(lim[0]), float(lim[1])
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.04 * (hi - lo)
        return lo - pad, hi + pad

    def px(self, v):
        lo, hi = self.xlim
        return self.x + (np.asarray(v, dtype=float) - lo) / (hi - lo) * self.w

    def py(self, v):
        lo, hi = self.ylim
        return self.y + self.h - (np.asarray(v, dtype=float) - lo) / (hi - lo) * self.h

    def _axes(self, xlabel, ylabel, title):
        c = self.c
        c.add(f'<rect x="{_f(self.x)}" y="{_f(self.y)}" width="{_f(self.w)}" height="{_f(self.h)}" '
              'fill="none" stroke="#444" stroke-width="1"/>')
        for t in nice_ticks(*self.xlim):
            X = float(self.px(t))
            c.add(f'<line x1="{_f(X)}" y1="{_f(self.y + self.h)}" x2="{_f(X)}" '
                  f'y2="{_f(self.y + self.h + 4)}" stroke="#444"/>')
            c.text(X, self.y + self.h + 16, f"{t:g}", size=10)
        for t in nice_ticks(*self.ylim):
            Y = float(self.py(t))
            c.add(f'<line x1="{_f(self.x - 4)}" y1="{_f(Y)}" x2="{_f(self.x)}" y2="{_f(Y)}" '
                  'stroke="#444"/>')
            c.text(self.x - 6, Y + 3, f"{t:g}", size=10, anchor="end")
        if xlabel:
            c.text(self.x + self.w / 2, self.y + self.h + 32, xlabel)
        if ylabel:
            c.text(self.x - 38, self.y + self.h / 2, ylabel, rotate=-90)
        if title:
            c.text(self.x + self.w / 2, self.y - 8, title, size=13)

    def line(self, xs, ys, color="#000", width=1.2, dash=None, opacity=1.0):
        xs, ys = decimate(np.asarray(xs), np.asarray(ys))
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in zip(self.px(xs), self.py(ys)))
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.c.add(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="{width}" stroke-opacity="{opacity}"{d}/>')

    def colored_line(self, xs, ys, values, vmin, vmax, width=2.0, segments=600):
        xs, ys, values = decimate(np.asarray(xs), np.asarray(ys), np.asarray(values), limit=segments)
        X, Y = self.px(xs), self.py(ys)
        for i in range(len(X) - 1):
            col = colormap((values[i] + values[i + 1]) / 2, vmin, vmax)
            self.c.add(f'<line x1="{_f(X[i])}" y1="{_f(Y[i])}" x2="{_f(X[i + 1])}" '
                       f'y2="{_f(Y[i + 1])}" stroke="{col}" stroke-width="{width}"/>')

    def marker(self, x, y, color="#d62728", r=4, label=None):
        X, Y = float(self.px(x)), float(self.py(y))
        self.c.add(f'<circle cx="{_f(X)}" cy="{_f(Y)}" r="{r}" fill="{color}"/>')
        if label:
            self.c.text(X, Y - 8, label, size=9, color=color)


def colormap(v, vmin, vmax):
    """Blue (low) to yellow (high), a viridis-like ramp."""
    stops = [(0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
             (0.75, (94, 201, 98)), (1.0, (253, 231, 37))]
    t = 0.5 if vmax <= vmin else min(1.0, max(0.0, (v - vmin) / (vmax - vmin)))
    for (t0, c0), (t1, c1) in zip(stops, stops[1:]):
        if t <= t1:
            u = (t - t0) / (t1 - t0)
            r, g, b = (round(a + u * (bb - a)) for a, bb in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


class PolarPanel:
    """Polar axes; radius is |value| in [0, 1], sign selects the line style."""

    def __init__(self, canvas, cx, cy, radius, title=""):
        self.c = canvas
        self.cx, self.cy, self.r = cx, cy, radius
        for frac in (0.25, 0.5, 0.75, 1.0):
            canvas.add(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(frac * radius)}" '
                       'fill="none" stroke="#bbb" stroke-width="0.8"/>')
        for k in range(8):
            a = k * math.pi / 4
            x, y = self._xy(a, 1.0)
            canvas.add(f'<line x1="{_f(cx)}" y1="{_f(cy)}" x2="{_f(x)}" y2="{_f(y)}" '
                       'stroke="#ddd" stroke-width="0.8"/>')
            lx, ly = self._xy(a, 1.12)
            canvas.text(lx, ly + 4, _angle_label(k), size=10)
        if title:
            canvas.text(cx, cy - radius - 28, title, size=13)

    def _xy(self, angle, rad):
        return self.cx + rad * self.r * math.cos(angle), self.cy - rad * self.r * math.sin(angle)

    def curve(self, angles, values, color="#000", width=1.5, dash_negative="2,3", dash=None):
        """Draw r=|value|; runs with negative values are dotted (folded curve)."""
        angles = np.asarray(angles, dtype=float)
        values = np.asarray(values, dtype=float)
        sign = values >= 0
        start = 0
        for i in range(1, len(values) + 1):
            if i == len(values) or sign[i] != sign[start]:
                seg = slice(start, min(i + 1, len(values)))
                pts = " ".join("{},{}".format(*map(_f, self._xy(a, abs(v))))
                               for a, v in zip(angles[seg], values[seg]))
                style = dash if sign[start] else dash_negative
                d = f' stroke-dasharray="{style}"' if style else ""
                self.c.add(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                           f'stroke-width="{width}"{d}/>')
                start = i


def _angle_label(k):
    return ("0", "π/4", "π/2", "3π/4", "π", "-3π/4", "-π/2", "-π/4")[k]
