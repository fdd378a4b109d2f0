"""Sampled plane curves: discrete curvature, arc-length resampling, CSV."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def circumcircle_curvature(points, closed=False):
    """Signed three-point curvature, sign convention ``x'' y' - y'' x'``.

    Open curves get linearly extrapolated values at the two end samples.
    """
    p = np.asarray(points, dtype=float)
    if closed:
        a, b, c = np.roll(p, 1, axis=0), p, np.roll(p, -1, axis=0)
    else:
        a, b, c = p[:-2], p[1:-1], p[2:]
    u, v = b - a, c - b
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    den = np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1) * np.linalg.norm(c - a, axis=1)
    k = -2.0 * cross / den
    if closed:
        return k
    if len(k) == 1:
        return np.array([k[0], k[0], k[0]])
    return np.concatenate([[2 * k[0] - k[1]], k, [2 * k[-1] - k[-2]]])


def discrete_tangent(points, closed=False):
    """Unit tangents: centred chords inside, second-order one-sided at ends."""
    p = np.asarray(points, dtype=float)
    if closed:
        t = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    else:
        t = np.empty_like(p)
        t[1:-1] = p[2:] - p[:-2]
        t[0] = -3 * p[0] + 4 * p[1] - p[2]
        t[-1] = 3 * p[-1] - 4 * p[-2] + p[-3]
    return t / np.linalg.norm(t, axis=1)[:, None]


def chord_lengths(points, closed=False):
    p = np.asarray(points, dtype=float)
    d = np.linalg.norm(np.diff(p, axis=0), axis=1)
    if closed:
        d = np.append(d, np.linalg.norm(p[0] - p[-1]))
    return d


@dataclass
class SampledCurve:
    """Ordered samples of a plane curve.

    ``points[:, 0]`` / ``points[:, 1]`` are ``(phi, psi)`` for revolution
    profiles and ``(y, z)`` for cylinder cross-sections.  ``tangent`` is
    ``d points / ds`` and is unit length when ``s`` is arc length.
    ``columns`` holds extra per-sample arrays (e.g. ``residual``).
    """

    s: np.ndarray
    points: np.ndarray
    tangent: np.ndarray
    kappa: np.ndarray
    closed: bool = False
    period: Optional[float] = None
    metadata: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        self.tangent = np.asarray(self.tangent, dtype=float)
        self.kappa = np.asarray(self.kappa, dtype=float)
        n = len(self.s)
        if self.points.shape != (n, 2) or self.tangent.shape != (n, 2) or self.kappa.shape != (n,):
            raise ValueError("inconsistent sample array shapes")
        if n > 1 and not np.all(np.diff(self.s) > 0):
            raise ValueError("s must be strictly increasing")
        if not (np.all(np.isfinite(self.points)) and np.all(np.isfinite(self.s))):
            raise ValueError("non-finite samples")

    def __len__(self):
        return len(self.s)

    @classmethod
    def from_points(cls, points, closed=False, metadata=None):
        p = np.asarray(points, dtype=float)
        d = chord_lengths(p, closed)
        s = np.concatenate([[0.0], np.cumsum(d[: len(p) - 1])])
        return cls(
            s,
            p,
            discrete_tangent(p, closed),
            circumcircle_curvature(p, closed),
            closed=closed,
            period=float(np.sum(d)) if closed else None,
            metadata=dict(metadata or {}),
        )

    def length(self) -> float:
        if self.closed:
            return float(self.period if self.period is not None else np.sum(chord_lengths(self.points, True)))
        return float(self.s[-1] - self.s[0])

    def min_spacing(self) -> float:
        return float(np.min(chord_lengths(self.points, self.closed)))

    def to_csv(self, columns=None) -> str:
        """CSV text; default columns ``s, phi, psi, dphi, dpsi, kappa`` plus extras."""
        base = {
            "s": self.s,
            "phi": self.points[:, 0],
            "psi": self.points[:, 1],
            "dphi": self.tangent[:, 0],
            "dpsi": self.tangent[:, 1],
            "kappa": self.kappa,
        }
        base.update(self.columns)
        names = list(columns) if columns else list(base)
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(names)
        for i in range(len(self)):
            wr.writerow([repr(float(base[k][i])) for k in names])
        return buf.getvalue()


def _spline(curve: SampledCurve):
    p = curve.points
    d = chord_lengths(p, curve.closed)
    if curve.closed:
        t = np.concatenate([[0.0], np.cumsum(d)])
        return CubicSpline(t, np.vstack([p, p[:1]]), bc_type="periodic"), t
    t = np.concatenate([[0.0], np.cumsum(d)])
    return CubicSpline(t, p), t


def _gl_length(sp, a, b):
    """Arc length of spline between parameter arrays ``a`` and ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid, half = (a + b) / 2, (b - a) / 2
    tot = np.zeros_like(mid)
    d1 = sp.derivative()
    for x, w in zip(_GL_X, _GL_W):
        tot += w * np.linalg.norm(d1(mid + half * x), axis=-1)
    return tot * half


def resample_arclength(curve: SampledCurve, n: int) -> SampledCurve:
    """``n`` samples equally spaced in arc length along a cubic-spline fit.

    Closed curves use a periodic spline and keep ``n`` distinct samples over
    one period; open curves keep both endpoints.
    """
    if n < 3:
        raise ValueError("need at least 3 samples")
    sp, t = _spline(curve)
    sub = 16
    tf = np.concatenate([np.linspace(t[i], t[i + 1], sub, endpoint=False) for i in range(len(t) - 1)] + [[t[-1]]])
    seg = _gl_length(sp, tf[:-1], tf[1:])
    Lf = np.concatenate([[0.0], np.cumsum(seg)])
    total = Lf[-1]
    targets = np.linspace(0.0, total, n, endpoint=not curve.closed)
    tt = np.interp(targets, Lf, tf)
    d1 = sp.derivative()
    for _ in range(3):
        k = np.clip(np.searchsorted(tf, tt, side="right") - 1, 0, len(tf) - 2)
        L = Lf[k] + _gl_length(sp, tf[k], tt)
        tt = tt - (L - targets) / np.linalg.norm(d1(tt), axis=-1)
    if not curve.closed:
        tt[0], tt[-1] = t[0], t[-1]
    pts = sp(tt)
    s = curve.s[0] + targets
    md = dict(curve.metadata)
    md["resampled"] = n
    out = SampledCurve(
        s,
        pts,
        discrete_tangent(pts, curve.closed),
        circumcircle_curvature(pts, curve.closed),
        closed=curve.closed,
        period=float(total) if curve.closed else None,
        metadata=md,
    )
    return out
