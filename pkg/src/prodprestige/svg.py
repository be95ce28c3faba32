"""Minimal static SVG figures: scatter plane, heatmaps, ridgelines and trend bands.

The figures are build artifacts for eyeballing results, so only what the report
needs is supported: linear axes, a handful of colours, no interactivity.
"""

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"]


class Figure:
    """Accumulates SVG elements on a fixed canvas."""

    def __init__(self, width=640, height=480):
        self.width = width
        self.height = height
        self.parts = []

    def add(self, element):
        self.parts.append(element)

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                 f'stroke="{stroke}" stroke-width="{width}"{d}/>')

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.add(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
                 f'fill="{fill}" stroke="{stroke}"/>')

    def circle(self, x, y, r, fill, opacity=0.6):
        self.add(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{fill}" fill-opacity="{opacity}"/>')

    def polyline(self, xs, ys, stroke, width=1.5):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        self.add(f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def polygon(self, xs, ys, fill, opacity=0.3):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        self.add(f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>')

    def text(self, x, y, s, size=11, anchor="start", rotate=None):
        r = f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate is not None else ""
        self.add(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
                 f'text-anchor="{anchor}"{r}>{escape(str(s))}</text>')

    def render(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, f'<rect width="100%" height="100%" fill="#fff"/>', *self.parts, "</svg>\n"])

    def save(self, path):
        Path(path).write_text(self.render(), encoding="utf-8")
        return Path(path)


class Axes:
    """Linear data-to-pixel mapping for one panel, with ticks and labels."""

    def __init__(self, fig, box, xlim, ylim):
        self.fig = fig
        self.x0, self.y0, self.w, self.h = box
        self.xlim = _padded(xlim)
        self.ylim = _padded(ylim)

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (np.asarray(x, dtype=float) - lo) / (hi - lo) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (np.asarray(y, dtype=float) - lo) / (hi - lo) * self.h

    def frame(self, xlabel="", ylabel="", title="", nticks=5):
        f = self.fig
        f.rect(self.x0, self.y0, self.w, self.h, "none", stroke="#333")
        for t in _ticks(self.xlim, nticks):
            x = float(self.px(t))
            f.line(x, self.y0 + self.h, x, self.y0 + self.h + 4)
            f.text(x, self.y0 + self.h + 16, _fmt(t), size=10, anchor="middle")
        for t in _ticks(self.ylim, nticks):
            y = float(self.py(t))
            f.line(self.x0 - 4, y, self.x0, y)
            f.text(self.x0 - 6, y + 3, _fmt(t), size=10, anchor="end")
        if xlabel:
            f.text(self.x0 + self.w / 2, self.y0 + self.h + 32, xlabel, anchor="middle")
        if ylabel:
            f.text(self.x0 - 38, self.y0 + self.h / 2, ylabel, anchor="middle", rotate=-90)
        if title:
            f.text(self.x0 + self.w / 2, self.y0 - 8, title, size=12, anchor="middle")


def _padded(lim):
    lo, hi = float(lim[0]), float(lim[1])
    if not np.isfinite(lo) or not np.isfinite(hi):
        return 0.0, 1.0
    if hi <= lo:
        return lo - 0.5, hi + 0.5
    return lo, hi


def _ticks(lim, n):
    lo, hi = lim
    step = 10 ** np.floor(np.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= n:
            step *= m
            break
    return np.arange(np.ceil(lo / step) * step, hi + step * 1e-9, step)


def _fmt(v):
    return f"{v:.0f}" if abs(v - round(v)) < 1e-9 else f"{v:.2g}"


def diverging_color(v, vmax):
    """White at 0, red for positive, blue for negative; grey for NaN."""
    if not np.isfinite(v):
        return "#cccccc"
    t = min(abs(v) / vmax, 1.0) if vmax > 0 else 0.0
    fade = int(round(255 * (1 - t)))
    return f"#ff{fade:02x}{fade:02x}" if v >= 0 else f"#{fade:02x}{fade:02x}ff"


def sequential_color(v, vmax):
    if not np.isfinite(v):
        return "#cccccc"
    t = min(max(v / vmax, 0.0), 1.0) if vmax > 0 else 0.0
    fade = int(round(255 * (1 - t)))
    return f"#{fade:02x}{int(round(255 - 120 * t)):02x}ff"


def scatter_plane(P, I, sectors=None, tau=3.5, title="", max_points=20_000, seed=0):
    """P-I scatter with the outlier thresholds and the axes drawn in."""
    P = np.asarray(P, dtype=float)
    I = np.asarray(I, dtype=float)
    if P.size > max_points:
        keep = np.sort(np.random.default_rng(seed).choice(P.size, max_points, replace=False))
        P, I = P[keep], I[keep]
        sectors = None if sectors is None else np.asarray(sectors)[keep]
    fig = Figure(560, 500)
    lim = (min(P.min(initial=0), I.min(initial=0), -tau - 1), max(P.max(initial=0), I.max(initial=0), tau + 1))
    ax = Axes(fig, (70, 30, 440, 410), lim, lim)
    colors = PALETTE if sectors is not None else ["#555"]
    codes = np.zeros(P.size, dtype=int) if sectors is None else np.asarray(sectors, dtype=int)
    for x, y, k in zip(ax.px(P), ax.py(I), codes):
        fig.circle(x, y, 1.5, colors[k % len(colors)])
    for v in (0.0, tau):
        fig.line(ax.px(v), ax.y0, ax.px(v), ax.y0 + ax.h, stroke="#999", dash="4,3")
        fig.line(ax.x0, ax.py(v), ax.x0 + ax.w, ax.py(v), stroke="#999", dash="4,3")
    ax.frame("productivity P", "journal prestige I", title)
    return fig


def heatmap(matrix, row_labels, col_labels, title="", diverging=True, vmax=None, annotate=True):
    """Cell-coloured matrix; NaN cells are grey."""
    m = np.asarray(matrix, dtype=float)
    nr, nc = m.shape
    cell = 48
    fig = Figure(90 + nc * cell + 20, 60 + nr * cell + 20)
    finite = np.abs(m[np.isfinite(m)])
    if vmax is None:
        vmax = float(finite.max()) if finite.size else 1.0
    color = diverging_color if diverging else sequential_color
    for r in range(nr):
        fig.text(84, 60 + r * cell + cell / 2 + 4, row_labels[r], anchor="end")
        for c in range(nc):
            x, y = 90 + c * cell, 60 + r * cell
            fig.rect(x, y, cell, cell, color(m[r, c], vmax), stroke="#fff")
            if annotate and np.isfinite(m[r, c]):
                fig.text(x + cell / 2, y + cell / 2 + 4, f"{m[r, c]:.2f}", size=9, anchor="middle")
    for c in range(nc):
        fig.text(90 + c * cell + cell / 2, 52, col_labels[c], size=10, anchor="middle")
    if title:
        fig.text(90, 20, title, size=12)
    return fig


def ridgeline(densities, title="", xlabel=""):
    """Stacked density curves; ``densities`` maps label -> (x grid, density)."""
    labels = list(densities)
    fig = Figure(560, 80 + 70 * max(len(labels), 1))
    if not labels:
        fig.text(20, 40, "no data")
        return fig
    xs = np.concatenate([np.asarray(densities[k][0], dtype=float) for k in labels])
    ax = Axes(fig, (120, 30, 410, 70 * len(labels)), (xs.min(), xs.max()), (0, len(labels)))
    for n, k in enumerate(labels):
        x, d = (np.asarray(v, dtype=float) for v in densities[k])
        peak = d.max() if d.size and d.max() > 0 else 1.0
        base = len(labels) - 1 - n
        ys = base + 0.9 * d / peak
        px, py = ax.px(x), ax.py(ys)
        fig.polygon([px[0], *px, px[-1]], [ax.py(base), *py, ax.py(base)], PALETTE[n % len(PALETTE)], 0.4)
        fig.polyline(px, py, PALETTE[n % len(PALETTE)])
        fig.text(ax.x0 - 6, float(ax.py(base + 0.3)), k, anchor="end")
    ax.frame(xlabel, "", title)
    return fig


def trend_bands(series, title="", xlabel="career age", ylabel="z-score"):
    """Mean lines with shaded intervals; ``series`` maps label -> (x, mean, lo, hi)."""
    fig = Figure(600, 420)
    if not series:
        fig.text(20, 40, "no data")
        return fig
    allx = np.concatenate([np.asarray(s[0], dtype=float) for s in series.values()])
    ally = np.concatenate([np.asarray(v, dtype=float) for s in series.values() for v in s[2:]])
    ax = Axes(fig, (70, 30, 400, 330), (allx.min(), allx.max()), (ally.min(), ally.max()))
    for n, (label, (x, mean, lo, hi)) in enumerate(series.items()):
        col = PALETTE[n % len(PALETTE)]
        px = ax.px(x)
        fig.polygon([*px, *px[::-1]], [*ax.py(hi), *ax.py(lo)[::-1]], col, 0.2)
        fig.polyline(px, ax.py(mean), col)
        fig.text(480, 40 + 16 * n, label, size=10)
        fig.line(472, 36 + 16 * n, 478, 36 + 16 * n, stroke=col, width=3)
    ax.frame(xlabel, ylabel, title)
    return fig
