"""Soliton residuals under homothetic helicoidal motions.

A surface is self-similar at ``t = 0`` when ``<cX + G X + T, N> = H``, where
``G`` is the skew rotation generator about the motion axis, ``T`` the
translation velocity along it and ``c`` the dilation rate.  The functions
here evaluate that condition pointwise, on grids, and in each of the
reduced forms available for the four surface families.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import Degenerate, ParamViolation, Singular
from .geometry import (
    TOL_PARAM,
    ConicalSurface,
    RuledSurface,
    SurfaceSample,
    ruled_invariants,
)

SCHEMA_VERSION = 1

_ROT = {
    "Z": np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
    "X": np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
}
_AXIS = {"Z": np.array([0.0, 0.0, 1.0]), "X": np.array([1.0, 0.0, 0.0])}


@dataclass(frozen=True)
class MotionGenerators:
    """Rates ``a`` (rotation), ``b`` (translation), ``c`` (dilation).

    ``axis="Z"`` is the convention for surfaces of revolution, ``axis="X"``
    the one for cylinders.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    axis: str = "Z"

    def __post_init__(self):
        if self.axis not in _ROT:
            raise ValueError(f"axis must be 'Z' or 'X', got {self.axis!r}")

    @property
    def gamma(self) -> np.ndarray:
        return self.a * _ROT[self.axis]

    @property
    def theta(self) -> np.ndarray:
        return self.b * _AXIS[self.axis]

    def apply(self, x) -> np.ndarray:
        """Infinitesimal motion ``L'(0) x = c x + G x + T``."""
        x = np.asarray(x, dtype=float)
        return self.c * x + self.gamma @ x + self.theta


def motion_field(point, gens: MotionGenerators) -> np.ndarray:
    return gens.apply(point)


def pointwise_residual(sample: SurfaceSample, gens: MotionGenerators) -> float:
    """``<L'(0) X, N> - H``; zero on a soliton."""
    return float(np.dot(gens.apply(sample.point), sample.normal)) - sample.H


# ---------------------------------------------------------------------------
# grid reports


@dataclass
class ResidualReport:
    samples: list = field(default_factory=list)  # [((s, u), r), ...]
    max_abs: float = 0.0
    l2: float = 0.0
    grid: Optional[dict] = None
    name: str = ""
    tolerance: Optional[float] = None
    status: str = "checked"  # or "disputed"

    @property
    def verdict(self) -> str:
        if self.status == "disputed":
            return "DISPUTED"
        if self.tolerance is None:
            return "N/A"
        return "PASS" if self.max_abs <= self.tolerance else "FAIL"

    @classmethod
    def from_samples(cls, samples, grid=None):
        vals = np.array([r for _, r in samples], dtype=float)
        if vals.size == 0:
            return cls([], 0.0, 0.0, grid)
        return cls(list(samples), float(np.max(np.abs(vals))), float(np.sqrt(np.sum(vals**2))), grid)

    def merge(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(
            self.samples + other.samples,
            max(self.max_abs, other.max_abs),
            math.hypot(self.l2, other.l2),
            None,
        )

    def to_dict(self, include_samples=False):
        d = {"schema_version": SCHEMA_VERSION, "grid": self.grid, "max_abs": self.max_abs, "l2": self.l2}
        if self.name:
            d["name"] = self.name
        if self.tolerance is not None or self.status != "checked":
            d.update(tolerance=self.tolerance, status=self.status, verdict=self.verdict)
        if include_samples:
            d["samples"] = [{"s": s, "u": u, "residual": r} for (s, u), r in self.samples]
        return d

    def to_json(self, include_samples=False) -> str:
        return json.dumps(self.to_dict(include_samples), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["s", "u", "residual"])
        for (s, u), r in self.samples:
            wr.writerow([repr(float(s)), repr(float(u)), repr(float(r))])
        return buf.getvalue()


def grid_points(s_range, u_range, counts):
    ns, nu = counts
    return np.linspace(*s_range, ns), np.linspace(*u_range, nu)


def residual_grid(surface, gens: MotionGenerators, s_range, u_range, counts) -> ResidualReport:
    """Evaluate :func:`pointwise_residual` on a tensor grid of ``(s, u)``."""
    ss, uu = grid_points(s_range, u_range, counts)
    samples = []
    for s in ss:
        for u in uu:
            samples.append(((float(s), float(u)), pointwise_residual(surface.sample(float(s), float(u)), gens)))
    grid = {"s_range": list(map(float, s_range)), "u_range": list(map(float, u_range)), "counts": list(counts)}
    return ResidualReport.from_samples(samples, grid)


# ---------------------------------------------------------------------------
# surfaces of revolution


class RevolutionTerms(NamedTuple):
    lhs: float  # kappa |tau|
    rhs: float
    raw: float
    normalized: float


def revolution_terms(state, gens: MotionGenerators, kappa: float) -> RevolutionTerms:
    phi, psi, dphi, dpsi = state.phi, state.psi, state.dphi, state.dpsi
    if phi <= 0.0:
        raise Singular(f"phi = {phi} <= 0")
    speed = math.hypot(dphi, dpsi)
    if speed == 0.0:
        raise Singular("profile curve is not regular")
    a_eta = phi * dpsi - psi * dphi  # <alpha, eta>
    e3_eta = -dphi
    e3_tau = dpsi
    parts = (kappa * speed, 2.0 * gens.c * a_eta, 2.0 * gens.b * e3_eta, e3_tau / phi)
    rhs = parts[1] + parts[2] + parts[3]
    raw = parts[0] - rhs
    return RevolutionTerms(parts[0], rhs, raw, raw / (1.0 + sum(abs(p) for p in parts)))


def revolution_soliton_residual(state, gens: MotionGenerators, kappa: float, normalized=False) -> float:
    """``kappa |tau| - (2c<alpha,eta> + 2b<e3,eta> + <e3,tau>/phi)``.

    ``state`` needs ``phi, psi, dphi, dpsi``; ``kappa`` is the signed
    curvature ``(phi'' psi' - psi'' phi') / |tau|^3`` of the profile.  The
    rotation rate is irrelevant for surfaces of revolution.  Equals
    ``-2 |tau|`` times :func:`pointwise_residual` at any ``u``.
    """
    t = revolution_terms(state, gens, kappa)
    return t.normalized if normalized else t.raw


class _Jet(NamedTuple):
    s: float
    phi: float
    psi: float
    dphi: float
    dpsi: float


def revolution_residual_at(surface, s, gens: MotionGenerators, normalized=False) -> float:
    p, q, p1, q1, p2, q2 = surface.jet(s)
    g = p1 * p1 + q1 * q1
    if g == 0.0:
        raise Singular(f"profile curve is not regular at s={s}")
    kappa = (p2 * q1 - q2 * p1) / g**1.5
    return revolution_soliton_residual(_Jet(s, p, q, p1, q1), gens, kappa, normalized)


# ---------------------------------------------------------------------------
# cylinders over plane curves


class PlaneCurveJet(NamedTuple):
    """Values of a plane directrix and its first two derivatives (arrays ok)."""

    h: object
    dh: object
    d2h: object
    q: object
    dq: object
    d2q: object


def _check_w(w, allow_unnormalized_w):
    w = np.asarray(w, dtype=float).reshape(3)
    if not allow_unnormalized_w and abs(np.linalg.norm(w) - 1.0) > TOL_PARAM:
        raise ParamViolation(
            f"|w| = {np.linalg.norm(w):.12g}; pass allow_unnormalized_w=True to evaluate the equations literally"
        )
    return w


def _nonzero_den(den):
    den = np.asarray(den, dtype=float)
    if np.any(den <= 1e-14):
        raise Degenerate("directrix velocity is parallel to the ruling")
    return den


def cylindrical_residuals_I(jet: PlaneCurveJet, w, gens: MotionGenerators, allow_unnormalized_w=False):
    """Directrix ``(0, h, q)``, ruling ``w = (x0, y0, z0)``, X-axis motion.

    Returns ``(r_alg, r_ode)``.  ``r_alg = a x0 <w, tau>`` is the ``u``
    coefficient; ``r_ode`` is twice the ``u``-free part of the soliton
    condition after clearing ``sqrt(|tau|^2 - <w,tau>^2)``:

        2c x0 (h q' - q h') + 2b (z0 h' - y0 q') - 2a x0 (q q' + h h')
            - x0 (q' h'' - q'' h') / (h'^2 + q'^2 - (y0 h' + z0 q')^2)
    """
    x0, y0, z0 = _check_w(w, allow_unnormalized_w)
    h, dh, d2h, q, dq, d2q = (np.asarray(v, dtype=float) for v in jet)
    a, b, c = gens.a, gens.b, gens.c
    wt = y0 * dh + z0 * dq
    r_alg = a * x0 * wt
    den = _nonzero_den(dh**2 + dq**2 - wt**2)
    lhs = 2 * c * x0 * (h * dq - q * dh) + 2 * b * (z0 * dh - y0 * dq) - 2 * a * x0 * (q * dq + h * dh)
    r_ode = lhs - x0 * (dq * d2h - d2q * dh) / den
    return r_alg, r_ode


def cylindrical_residuals_II(jet: PlaneCurveJet, w, gens: MotionGenerators, allow_unnormalized_w=False):
    """Directrix ``(h, q, 0)``, ruling ``w = (x0, y0, z0)``, X-axis motion.

    ``r_alg = a[(y0^2 + z0^2) h' - x0 y0 q']`` and

        r_ode = 2c z0 (h q' - q h') + 2b z0 q' + 2a q (y0 h' - x0 q')
                - z0 (q' h'' - q'' h') / (h'^2 + q'^2 - (x0 h' + y0 q')^2)

    The rotation term pairs ``q'`` with ``x0``: ``G(h, q, 0) = (0, 0, a q)``
    dotted with ``beta' ^ w = (z0 q', -z0 h', y0 h' - x0 q')``.
    """
    x0, y0, z0 = _check_w(w, allow_unnormalized_w)
    h, dh, d2h, q, dq, d2q = (np.asarray(v, dtype=float) for v in jet)
    a, b, c = gens.a, gens.b, gens.c
    r_alg = a * ((y0**2 + z0**2) * dh - x0 * y0 * dq)
    wt = x0 * dh + y0 * dq
    den = _nonzero_den(dh**2 + dq**2 - wt**2)
    lhs = 2 * c * z0 * (h * dq - q * dh) + 2 * b * z0 * dq + 2 * a * q * (y0 * dh - x0 * dq)
    r_ode = lhs - z0 * (dq * d2h - d2q * dh) / den
    return r_alg, r_ode


def plane_curve_curvature(jet: PlaneCurveJet):
    """Signed curvature ``(h'' q' - q'' h') / |beta'|^3`` (profile convention)."""
    h, dh, d2h, q, dq, d2q = (np.asarray(v, dtype=float) for v in jet)
    return (d2h * dq - d2q * dh) / (dh**2 + dq**2) ** 1.5


# ---------------------------------------------------------------------------
# noncylindrical ruled surfaces


@dataclass(frozen=True)
class NoncylindricalCoefficients:
    V: float
    W: float
    Y: float
    Z: float
    C: float
    D: float
    A: float
    B: float


def noncylindrical_coefficients(surface: RuledSurface, gens: MotionGenerators, s) -> NoncylindricalCoefficients:
    surface.check(s)
    beta, w, w1 = surface.b0(s), surface.w0(s), surface.w1(s)
    m = np.cross(w1, w)
    G, T, c = gens.gamma, gens.theta, gens.c
    return NoncylindricalCoefficients(
        V=float(G @ beta @ w1),
        W=float(G @ w @ w1),
        Y=float(G @ beta @ m),
        Z=float(G @ w @ m),
        C=float(T @ w1),
        D=float(T @ m),
        A=float(c * beta @ m),
        B=float(c * beta @ w1),
    )


def noncylindrical_quartic(surface: RuledSurface, gens: MotionGenerators, s) -> np.ndarray:
    """Coefficients ``(c4, c3, c2, c1, c0)`` of ``2(lam^2+u^2)^{3/2}`` times the residual.

    The order matches :func:`numpy.polyval`.
    """
    inv = ruled_invariants(surface, s)
    k = noncylindrical_coefficients(surface, gens, s)
    lam = inv.lam
    vcb = k.V + k.C + k.B
    yda = k.Y + k.D + k.A
    return np.array(
        [
            2 * k.Z,
            2 * (lam * k.W + yda),
            2 * (lam**2 * k.Z + lam * vcb + inv.J / 2),
            2 * lam**3 * k.W + 2 * lam**2 * yda + inv.lam_prime,
            2 * lam**3 * vcb + lam * inv.F + lam**2 * inv.J,
        ]
    )


# ---------------------------------------------------------------------------
# cones


def conical_residual_system(surface: ConicalSurface, gens: MotionGenerators, s):
    """``(r1, r2, r3)`` with ``u |w'| * residual = r1 u^2 + r2 u - r3``."""
    surface.check(s)
    w0, w1, w2 = surface.w0(s), surface.w1(s), surface.w2(s)
    m = np.cross(w1, w0)
    r1 = float((gens.gamma @ w0 + gens.c * w0) @ m)
    r2 = float(gens.apply(surface.apex) @ m)
    r3 = float(w2 @ m) / (2.0 * float(w1 @ w1))
    return r1, r2, r3


# ---------------------------------------------------------------------------
# parameter discovery


def bisect_parameter(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of a scalar residual on a sign-changing bracket."""
    return bisect(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=400)


def shrinking_cylinder_rate(r: float, tol: float = 1e-12) -> float:
    """Dilation rate making the round cylinder of radius ``r`` a soliton."""
    state = _Jet(0.0, r, 0.0, 0.0, 1.0)
    fn = lambda c: revolution_soliton_residual(state, MotionGenerators(c=c), 0.0)
    lim = 1.0 + 1.0 / r**2
    return bisect_parameter(fn, -lim, lim, tol)
