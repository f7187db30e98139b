"""Tiny dependency-free SVG writers for the CLI plots.

Plots are decorative; all acceptance numbers live in the CSV/JSON outputs.
"""

from __future__ import annotations

import math

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 60, 20, 20, 45
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _scale(vals, lo, hi, out_lo, out_hi):
    if hi == lo:
        hi = lo + 1.0
    return [out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo) for v in vals]


def _header() -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]


def _axes(xlabel: str, ylabel: str, title: str) -> list[str]:
    parts = [
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 10}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{(_MT + _H - _MB) / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 15 {(_MT + _H - _MB) / 2})">{ylabel}</text>',
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_MT - 4}" font-size="14" '
        f'text-anchor="middle">{title}</text>',
    ]
    return parts


def line_chart(
    series: list[tuple[str, list[float], list[float]]],
    xlabel: str,
    ylabel: str,
    title: str,
    log_x: bool = False,
) -> str:
    """Polyline chart; series is a list of (label, xs, ys)."""
    xs_all, ys_all = [], []
    for _, xs, ys in series:
        xs_all += [math.log10(x) for x in xs] if log_x else list(xs)
        ys_all += list(ys)
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all + [0.0]), max(ys_all)
    parts = _header() + _axes(xlabel, ylabel, title)
    for i, (label, xs, ys) in enumerate(series):
        px = _scale(
            [math.log10(x) for x in xs] if log_x else xs, x_lo, x_hi, _ML, _W - _MR
        )
        py = _scale(ys, y_lo, y_hi, _H - _MB, _MT)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        col = _COLORS[i % len(_COLORS)]
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>'
        )
        for x, y in zip(px, py):
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{col}"/>')
        parts.append(
            f'<text x="{_W - _MR - 5}" y="{_MT + 16 * (i + 1)}" font-size="12" '
            f'text-anchor="end" fill="{col}">{label}</text>'
        )
    parts.append(f'<text x="{_ML - 8}" y="{_H - _MB + 4}" font-size="10" '
                 f'text-anchor="end">{y_lo:.3g}</text>')
    parts.append(f'<text x="{_ML - 8}" y="{_MT + 4}" font-size="10" '
                 f'text-anchor="end">{y_hi:.3g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def path_overlay(
    paths: list[tuple[str, list[tuple[float, float]]]],
    shade_intervals: list[tuple[float, float]],
    T: float,
    title: str,
) -> str:
    """Overlay of completed-graph polylines with shaded time intervals."""
    ys_all = [y for _, poly in paths for _, y in poly]
    y_lo, y_hi = min(ys_all), max(ys_all)
    parts = _header() + _axes("time", "value", title)

    def sx(t):
        return _ML + t / T * (_W - _MR - _ML)

    for i, (a, b) in enumerate(shade_intervals):
        if i % 2 == 0:
            parts.append(
                f'<rect x="{sx(a):.2f}" y="{_MT}" width="{max(sx(b) - sx(a), 0.0):.2f}" '
                f'height="{_H - _MB - _MT}" fill="#dddddd" opacity="0.5"/>'
            )
    for i, (label, poly) in enumerate(paths):
        py = _scale([y for _, y in poly], y_lo, y_hi, _H - _MB, _MT)
        pts = " ".join(f"{sx(t):.2f},{y:.2f}" for (t, _), y in zip(poly, py))
        col = _COLORS[i % len(_COLORS)]
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.2"/>'
        )
        parts.append(
            f'<text x="{_W - _MR - 5}" y="{_MT + 16 * (i + 1)}" font-size="12" '
            f'text-anchor="end" fill="{col}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
