"""Minimal self-contained SVG scatter + curve plots.

Output depends only on the inputs (no timestamps, no generated ids), so the
files can be compared byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import DegenerateRangeError


@dataclass(frozen=True)
class AxesSpec:
    title: str
    xlabel: str
    ylabel: str
    log: bool = False
    width: int = 640
    height: int = 480


@dataclass(frozen=True)
class PlotSeries:
    """Measured points with vertical error bars plus one model polyline."""

    labels: Sequence[str]
    x: Sequence[float]
    y: Sequence[float]
    y_lo: Sequence[float]
    y_hi: Sequence[float]
    curve_x: Sequence[float] = field(default_factory=list)
    curve_y: Sequence[float] = field(default_factory=list)
    measured_label: str = "measured"
    model_label: str = "model"


_MARGIN = dict(left=80, right=20, top=40, bottom=60)


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _log_ticks(lo, hi):
    # lo, hi are log10 values
    ticks = [float(e) for e in range(math.ceil(lo), math.floor(hi) + 1)]
    return ticks or [lo, hi]


def _fmt(v):
    return f"{v:.2f}"


def render_svg(series: PlotSeries, axes: AxesSpec) -> str:
    n = len(series.x)
    if n < 1:
        raise DegenerateRangeError("nothing to plot: at least one row is required")
    x = np.asarray(series.x, dtype=float)
    y = np.asarray(series.y, dtype=float)
    ylo = np.asarray(series.y_lo, dtype=float)
    yhi = np.asarray(series.y_hi, dtype=float)
    cx = np.asarray(series.curve_x, dtype=float)
    cy = np.asarray(series.curve_y, dtype=float)

    if axes.log:
        for arr, name in ((x, "x"), (y, "y")):
            bad = np.flatnonzero(~(arr > 0))
            if bad.size:
                row = series.labels[bad[0]]
                raise DegenerateRangeError(
                    f"log axis needs positive {name} values; row {row!r} has {name} = {arr[bad[0]]:g}")
        bad = np.flatnonzero(~((cx > 0) & (cy > 0)))
        if bad.size:
            raise DegenerateRangeError(f"log axis: model curve sample {bad[0]} is not positive")
        tx = np.log10
        ylo = np.where(ylo > 0, ylo, np.nan)
    else:
        tx = np.asarray

    X = tx(x)
    Y = tx(y)
    all_x = np.concatenate([X, tx(cx)])
    all_y = np.concatenate([Y, tx(ylo[np.isfinite(ylo)]), tx(yhi), tx(cy)])
    x0, x1 = float(np.nanmin(all_x)), float(np.nanmax(all_x))
    y0, y1 = float(np.nanmin(all_y)), float(np.nanmax(all_y))
    if not x1 > x0:
        raise DegenerateRangeError(f"x range is degenerate ({x0:g} .. {x1:g})")
    if not y1 > y0:
        raise DegenerateRangeError(f"y range is degenerate ({y0:g} .. {y1:g})")
    pad_x, pad_y = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y

    W, H = axes.width, axes.height
    L, R, T, B = _MARGIN["left"], W - _MARGIN["right"], _MARGIN["top"], H - _MARGIN["bottom"]

    def px(v):
        return L + (v - x0) / (x1 - x0) * (R - L)

    def py(v):
        return B - (v - y0) / (y1 - y0) * (B - T)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="24" text-anchor="middle" font-size="16">{escape(axes.title)}</text>',
        '<g class="axes" stroke="black" fill="none">',
        f'<rect x="{L}" y="{T}" width="{R - L}" height="{B - T}"/>',
        "</g>",
        '<g class="ticks" font-size="11">',
    ]
    xt = _log_ticks(x0, x1) if axes.log else _nice_ticks(x0, x1)
    yt = _log_ticks(y0, y1) if axes.log else _nice_ticks(y0, y1)
    for t in xt:
        label = f"1e{int(t)}" if axes.log and t == int(t) else f"{(10**t if axes.log else t):g}"
        out.append(f'<line x1="{_fmt(px(t))}" y1="{B}" x2="{_fmt(px(t))}" y2="{B + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{B + 18}" text-anchor="middle">{label}</text>')
    for t in yt:
        label = f"1e{int(t)}" if axes.log and t == int(t) else f"{(10**t if axes.log else t):g}"
        out.append(f'<line x1="{L - 5}" y1="{_fmt(py(t))}" x2="{L}" y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end">{label}</text>')
    out.append("</g>")
    out.append(f'<text x="{(L + R) / 2:.1f}" y="{H - 15}" text-anchor="middle" font-size="13">'
               f"{escape(axes.xlabel)}</text>")
    out.append(f'<text x="18" y="{(T + B) / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 18 {(T + B) / 2:.1f})">{escape(axes.ylabel)}</text>')

    if cx.size:
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(tx(cx), tx(cy)))
        out.append(f'<polyline class="model" fill="none" stroke="#c0392b" stroke-width="2" points="{pts}"/>')

    out.append('<g class="measured" stroke="#1f4e9c" fill="#1f4e9c">')
    for i in range(n):
        xp, yp = px(X[i]), py(Y[i])
        lo = py(tx(ylo[i])) if np.isfinite(ylo[i]) else B
        hi = py(tx(yhi[i]))
        out.append(f'<g class="point" data-row={quoteattr(str(series.labels[i]))}>')
        out.append(f'<line class="errorbar" x1="{_fmt(xp)}" y1="{_fmt(lo)}" x2="{_fmt(xp)}" y2="{_fmt(hi)}"/>')
        out.append(f'<line class="cap" x1="{_fmt(xp - 4)}" y1="{_fmt(lo)}" x2="{_fmt(xp + 4)}" y2="{_fmt(lo)}"/>')
        out.append(f'<line class="cap" x1="{_fmt(xp - 4)}" y1="{_fmt(hi)}" x2="{_fmt(xp + 4)}" y2="{_fmt(hi)}"/>')
        out.append(f'<circle class="marker" cx="{_fmt(xp)}" cy="{_fmt(yp)}" r="4"/>')
        out.append("</g>")
    out.append("</g>")

    lx, ly = L + 15, T + 20
    out += [
        '<g class="legend" font-size="12">',
        f'<circle cx="{lx}" cy="{ly}" r="4" fill="#1f4e9c"/>',
        f'<text x="{lx + 12}" y="{ly + 4}">{escape(series.measured_label)}</text>',
        f'<line x1="{lx - 8}" y1="{ly + 20}" x2="{lx + 8}" y2="{ly + 20}" stroke="#c0392b" stroke-width="2"/>',
        f'<text x="{lx + 12}" y="{ly + 24}">{escape(series.model_label)}</text>',
        "</g>",
        "</svg>",
        "",
    ]
    return "\n".join(out)
