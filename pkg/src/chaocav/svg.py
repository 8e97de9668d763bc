"""Self-contained SVG charts: multi-series lines and filled contours.

No external assets, scripts or fonts; everything is plain shapes and
text so the files can be archived alongside the CSV output.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")

_PALETTE = (
    (0.00, (68, 1, 84)),
    (0.17, (70, 50, 126)),
    (0.33, (54, 92, 141)),
    (0.50, (39, 127, 142)),
    (0.67, (31, 161, 135)),
    (0.83, (74, 193, 109)),
    (1.00, (253, 231, 37)),
)


def _heat_color(u):
    u = min(1.0, max(0.0, float(u)))
    for k in range(len(_PALETTE) - 1):
        u0, c0 = _PALETTE[k]
        u1, c1 = _PALETTE[k + 1]
        if u <= u1:
            w = 0.0 if u1 == u0 else (u - u0) / (u1 - u0)
            rgb = tuple(round(a + w * (b - a)) for a, b in zip(c0, c1))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % _PALETTE[-1][1]


def _nice_ticks(lo, hi, target=6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0, 1.0]
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(2, target - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next((c * mag for c in (1.0, 2.0, 2.5, 5.0, 10.0) if c * mag >= raw), 10.0 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks or [lo, hi]


def _fmt_tick(v):
    if v == int(v) and abs(v) < 1e6:
        return str(int(v))
    return f"{v:.4g}"


def _span(values, fallback=(0.0, 1.0)):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return fallback
    lo = float(finite.min())
    hi = float(finite.max())
    if hi <= lo:
        pad = 0.5 if lo == 0.0 else abs(lo) * 0.05
        return lo - pad, hi + pad
    return lo, hi


class _Frame:
    """Pixel mapping and shared chrome (axes, ticks, labels) for one chart."""

    def __init__(self, width, height, ml, mr, mt, mb, x_range, y_range):
        self.width = width
        self.height = height
        self.ml, self.mr, self.mt, self.mb = ml, mr, mt, mb
        self.pw = width - ml - mr
        self.ph = height - mt - mb
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range

    def px(self, x):
        return self.ml + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y):
        return self.mt + self.ph - (y - self.y0) / (self.y1 - self.y0) * self.ph

    def open_tag(self):
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}" '
                f'font-family="sans-serif">\n'
                f'<rect width="{self.width}" height="{self.height}" fill="white"/>\n')

    def chrome(self, title, xlabel, ylabel, grid=True):
        parts = []
        for tx in _nice_ticks(self.x0, self.x1):
            if not (self.x0 <= tx <= self.x1):
                continue
            x = self.px(tx)
            if grid:
                parts.append(f'<line x1="{x:.2f}" y1="{self.mt}" x2="{x:.2f}" '
                             f'y2="{self.mt + self.ph}" stroke="#dddddd" stroke-width="1"/>')
            parts.append(f'<text x="{x:.2f}" y="{self.mt + self.ph + 18}" font-size="12" '
                         f'text-anchor="middle">{_fmt_tick(tx)}</text>')
        for ty in _nice_ticks(self.y0, self.y1):
            if not (self.y0 <= ty <= self.y1):
                continue
            y = self.py(ty)
            if grid:
                parts.append(f'<line x1="{self.ml}" y1="{y:.2f}" x2="{self.ml + self.pw}" '
                             f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>')
            parts.append(f'<text x="{self.ml - 8}" y="{y + 4:.2f}" font-size="12" '
                         f'text-anchor="end">{_fmt_tick(ty)}</text>')
        parts.append(f'<rect x="{self.ml}" y="{self.mt}" width="{self.pw}" '
                     f'height="{self.ph}" fill="none" stroke="#333333" stroke-width="1"/>')
        if title:
            parts.append(f'<text x="{self.width / 2:.0f}" y="24" font-size="15" '
                         f'text-anchor="middle">{escape(title)}</text>')
        if xlabel:
            parts.append(f'<text x="{self.ml + self.pw / 2:.0f}" y="{self.height - 12}" '
                         f'font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
        if ylabel:
            yc = self.mt + self.ph / 2
            parts.append(f'<text x="18" y="{yc:.0f}" font-size="13" text-anchor="middle" '
                         f'transform="rotate(-90 18 {yc:.0f})">{escape(ylabel)}</text>')
        return "\n".join(parts) + "\n"


def render_line_chart(series, title="", xlabel="", ylabel="", width=720, height=480):
    """SVG string for labeled (x, y) series; NaN samples break the line."""
    if not series:
        raise ValueError("need at least one series")
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    frame = _Frame(width, height, 72, 26, 44, 54, _span(xs), _span(ys))
    out = [frame.open_tag(), frame.chrome(title, xlabel, ylabel)]
    for k, (label, sx, sy) in enumerate(series):
        color = LINE_COLORS[k % len(LINE_COLORS)]
        sx = np.asarray(sx, dtype=float)
        sy = np.asarray(sy, dtype=float)
        good = np.isfinite(sx) & np.isfinite(sy)
        run = []
        segments = []
        for i in range(sx.size):
            if good[i]:
                run.append(f"{frame.px(sx[i]):.2f},{frame.py(sy[i]):.2f}")
            elif run:
                segments.append(run)
                run = []
        if run:
            segments.append(run)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>\n')
            else:
                out.append(f'<polyline points="{" ".join(seg)}" fill="none" '
                           f'stroke="{color}" stroke-width="1.6"/>\n')
        ly = frame.mt + 16 + 16 * k
        lx = frame.ml + frame.pw - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>\n')
        out.append(f'<text x="{lx + 28}" y="{ly}" font-size="12">{escape(str(label))}</text>\n')
    out.append("</svg>\n")
    return "".join(out)


_MS_SEGMENTS = {
    1: ((3, 0),), 2: ((0, 1),), 3: ((3, 1),), 4: ((1, 2),),
    6: ((0, 2),), 7: ((3, 2),), 8: ((2, 3),), 9: ((0, 2),),
    11: ((1, 2),), 12: ((1, 3),), 13: ((0, 1),), 14: ((3, 0),),
}


def _iso_segments(x, y, z, level):
    # Marching squares on the node grid; ambiguous cells split by the
    # cell-center value.
    segs = []
    for i in range(len(y) - 1):
        for j in range(len(x) - 1):
            v = (z[i, j], z[i, j + 1], z[i + 1, j + 1], z[i + 1, j])
            if not all(np.isfinite(v)):
                continue
            mask = sum(1 << k for k in range(4) if v[k] >= level)
            if mask in (0, 15):
                continue
            corners = ((x[j], y[i]), (x[j + 1], y[i]),
                       (x[j + 1], y[i + 1]), (x[j], y[i + 1]))

            def cross(edge):
                a, b = edge, (edge + 1) % 4
                va, vb = v[a], v[b]
                w = 0.5 if vb == va else (level - va) / (vb - va)
                return (corners[a][0] + w * (corners[b][0] - corners[a][0]),
                        corners[a][1] + w * (corners[b][1] - corners[a][1]))

            if mask in (5, 10):
                center_in = (sum(v) / 4.0) >= level
                if mask == 5:
                    pairs = ((1, 0), (3, 2)) if center_in else ((3, 0), (1, 2))
                else:
                    pairs = ((0, 3), (2, 1)) if center_in else ((0, 1), (2, 3))
            else:
                pairs = _MS_SEGMENTS[mask]
            for ea, eb in pairs:
                segs.append((cross(ea), cross(eb)))
    return segs


def render_contour_chart(x, y, z, title="", xlabel="", ylabel="",
                         iso_levels=(0.95,), width=760, height=520):
    """Filled contour of z[i, j] sampled at (y[i], x[j]), plus iso lines.

    Cells are painted with the mean of their corner values; iso_levels
    are overlaid with marching squares and a colorbar sits on the right.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (y.size, x.size):
        raise ValueError(f"z must have shape (len(y), len(x)) = {(y.size, x.size)}, got {z.shape}")
    if x.size < 2 or y.size < 2:
        raise ValueError("need at least a 2x2 grid")
    frame = _Frame(width, height, 72, 96, 44, 54, (float(x[0]), float(x[-1])),
                   (float(y[0]), float(y[-1])))
    vlo, vhi = _span(z)
    out = [frame.open_tag()]
    for i in range(y.size - 1):
        ya = frame.py(y[i])
        yb = frame.py(y[i + 1])
        top, hgt = (yb, ya - yb) if ya >= yb else (ya, yb - ya)
        for j in range(x.size - 1):
            cell = (z[i, j], z[i, j + 1], z[i + 1, j], z[i + 1, j + 1])
            finite = [c for c in cell if np.isfinite(c)]
            if not finite:
                continue
            xa = frame.px(x[j])
            xb = frame.px(x[j + 1])
            color = _heat_color((sum(finite) / len(finite) - vlo) / (vhi - vlo))
            out.append(f'<rect x="{xa:.2f}" y="{top:.2f}" width="{xb - xa:.2f}" '
                       f'height="{hgt:.2f}" fill="{color}"/>\n')
    for level in iso_levels:
        for (xa, ya), (xb, yb) in _iso_segments(x, y, z, level):
            out.append(f'<line x1="{frame.px(xa):.2f}" y1="{frame.py(ya):.2f}" '
                       f'x2="{frame.px(xb):.2f}" y2="{frame.py(yb):.2f}" '
                       f'stroke="white" stroke-width="1.5"/>\n')
    out.append(frame.chrome(title, xlabel, ylabel, grid=False))
    bar_x = frame.ml + frame.pw + 24
    steps = 32
    for k in range(steps):
        u0 = k / steps
        top = frame.mt + frame.ph * (1.0 - (k + 1) / steps)
        out.append(f'<rect x="{bar_x}" y="{top:.2f}" width="16" '
                   f'height="{frame.ph / steps + 0.5:.2f}" fill="{_heat_color(u0 + 0.5 / steps)}"/>\n')
    out.append(f'<rect x="{bar_x}" y="{frame.mt}" width="16" height="{frame.ph}" '
               f'fill="none" stroke="#333333" stroke-width="1"/>\n')
    out.append(f'<text x="{bar_x + 22}" y="{frame.mt + frame.ph + 4}" '
               f'font-size="11">{_fmt_tick(vlo)}</text>\n')
    out.append(f'<text x="{bar_x + 22}" y="{frame.mt + 10}" font-size="11">{_fmt_tick(vhi)}</text>\n')
    for level in iso_levels:
        if vlo < level < vhi:
            ly = frame.mt + frame.ph * (1.0 - (level - vlo) / (vhi - vlo))
            out.append(f'<line x1="{bar_x}" y1="{ly:.2f}" x2="{bar_x + 16}" y2="{ly:.2f}" '
                       f'stroke="white" stroke-width="2"/>\n')
            out.append(f'<text x="{bar_x + 22}" y="{ly + 4:.2f}" '
                       f'font-size="11">{_fmt_tick(level)}</text>\n')
    out.append("</svg>\n")
    return "".join(out)
