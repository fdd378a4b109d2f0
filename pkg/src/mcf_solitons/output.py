"""Deterministic file emitters: minimal SVG line plots, CSV and JSON."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def svg_plot(series, title="", xlabel="x", ylabel="y", width=480, height=360, equal=True, generator=None) -> str:
    """Overlay polylines ``[(label, xs, ys), ...]`` with a framed axes box.

    ``equal`` keeps one data unit the same length on both axes.
    """
    xs = np.concatenate([np.asarray(x, dtype=float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, _, y in series])
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    m = 50
    pw, ph = width - 2 * m, height - 2 * m
    sx, sy = pw / (x1 - x0), ph / (y1 - y0)
    if equal:
        sx = sy = min(sx, sy)

    def X(x):
        return m + (x - x0) * sx

    def Y(y):
        return height - m - (y - y0) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if generator:
        out.append(f"<!-- generator: {escape(generator)} -->")
    out += [
        f'<rect x="{m}" y="{m}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>',
        f'<text x="{width / 2:.1f}" y="{m / 2:.1f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {height / 2:.1f})">{escape(ylabel)}</text>',
        f'<text x="{m}" y="{height - m + 14}" font-size="10">{x0:.3g}</text>',
        f'<text x="{width - m}" y="{height - m + 14}" font-size="10" text-anchor="end">{x0 + pw / sx:.3g}</text>',
        f'<text x="{m - 4}" y="{height - m}" font-size="10" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{m - 4}" y="{m + 10}" font-size="10" text-anchor="end">{y0 + ph / sy:.3g}</text>',
    ]
    for i, (label, x, y) in enumerate(series):
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(x, y))
        color = COLORS[i % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{escape(str(label))}</title></polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def snapshots_csv(times, snapshots, names=("y", "z")) -> str:
    rows = []
    for t, snap in zip(times, snapshots):
        for i, (a, b) in enumerate(snap.points):
            rows.append((float(t), i, float(a), float(b)))
    return rows_to_csv(("t", "index") + tuple(names), rows)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def to_json(obj) -> str:
    """Stable JSON: sorted keys, private ``_`` keys dropped, inf as strings."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
