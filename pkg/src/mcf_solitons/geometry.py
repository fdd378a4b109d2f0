"""Curvature evaluators for ruled, cylindrical, conical and revolution surfaces.

Every surface takes analytic derivative closures when they are available.
Missing first derivatives fall back to central differences with step
``H_FD``; missing second derivatives use a Richardson-extrapolated central
second difference.

Normals follow the orientation written for each family (see the package
docstring); the sign of every mean curvature below is tied to that choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import Degenerate, ParamViolation, Singular

TOL_PARAM = 1e-8
H_FD = 1e-6
H_FD2 = 1e-3

Vec = np.ndarray
ScalarFn = Callable[[float], float]
VecFn = Callable[[float], Vec]


def central_diff(f, s, h=H_FD):
    return (np.asarray(f(s + h)) - np.asarray(f(s - h))) / (2.0 * h)


def central_diff2(f, s, h=H_FD2):
    """Second derivative: Richardson combination of two central stencils."""

    def d2(step):
        return (np.asarray(f(s + step)) - 2.0 * np.asarray(f(s)) + np.asarray(f(s - step))) / step**2

    return (4.0 * d2(h / 2.0) - d2(h)) / 3.0


def _vec(x) -> Vec:
    return np.asarray(x, dtype=float).reshape(3)


def _unit(v: Vec) -> Vec:
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class SurfaceSample:
    point: Vec
    normal: Vec
    H: float
    K: float
    s: float
    u: float


@dataclass(frozen=True)
class RuledInvariants:
    lam: float
    lam_prime: float
    F: float
    J: float


@dataclass(frozen=True)
class CurveFrame:
    tau: Vec
    eta: Vec
    kappa: float


# ---------------------------------------------------------------------------
# Ruled surfaces X(s, u) = beta(s) + u w(s)


@dataclass(frozen=True)
class RuledSurface:
    """Ruled surface ``beta(s) + u w(s)``.

    ``mode`` is one of ``"noncylindrical"`` (striction-line parameterization
    with ``|w| = |w'| = 1`` and ``<beta', w'> = 0``) or ``"cylindrical"``
    (constant ``w``).  Conical surfaces have their own class.
    """

    beta: VecFn
    w: VecFn
    dbeta: Optional[VecFn] = None
    d2beta: Optional[VecFn] = None
    dw: Optional[VecFn] = None
    d2w: Optional[VecFn] = None
    mode: str = "noncylindrical"
    tol: float = TOL_PARAM
    name: str = field(default="ruled", compare=False)

    def __post_init__(self):
        if self.mode not in ("noncylindrical", "cylindrical"):
            raise ValueError(f"unknown ruled mode {self.mode!r}")

    def b0(self, s):
        return _vec(self.beta(s))

    def b1(self, s):
        return _vec(self.dbeta(s) if self.dbeta else central_diff(self.beta, s))

    def b2(self, s):
        return _vec(self.d2beta(s) if self.d2beta else central_diff2(self.beta, s))

    def w0(self, s):
        return _vec(self.w(s))

    def w1(self, s):
        if self.mode == "cylindrical":
            return np.zeros(3)
        return _vec(self.dw(s) if self.dw else central_diff(self.w, s))

    def w2(self, s):
        if self.mode == "cylindrical":
            return np.zeros(3)
        return _vec(self.d2w(s) if self.d2w else central_diff2(self.w, s))

    def point(self, s, u):
        return self.b0(s) + u * self.w0(s)

    def tangents(self, s, u):
        return self.b1(s) + u * self.w1(s), self.w0(s)

    def check(self, s):
        w = self.w0(s)
        if self.mode == "cylindrical":
            if self.dw is not None and np.linalg.norm(_vec(self.dw(s))) > self.tol:
                raise ParamViolation(f"cylindrical mode needs constant w (|w'|={np.linalg.norm(self.dw(s)):.3e})")
            return
        w1 = self.w1(s)
        errs = {
            "|w|-1": abs(np.linalg.norm(w) - 1.0),
            "|w'|-1": abs(np.linalg.norm(w1) - 1.0),
            "<beta',w'>": abs(float(np.dot(self.b1(s), w1))),
        }
        bad = {k: v for k, v in errs.items() if v > self.tol}
        if bad:
            detail = ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
            raise ParamViolation(f"noncylindrical parameterization violated at s={s}: {detail}")

    def sample(self, s, u) -> SurfaceSample:
        if self.mode == "cylindrical":
            n = cylindrical_normal(self, s)
            H = cylindrical_mean_curvature(self, s)
            K = 0.0
        else:
            n = ruled_normal(self, s, u)
            H = ruled_mean_curvature(self, s, u)
            K = ruled_gauss_curvature(self, s, u)
        return SurfaceSample(self.point(s, u), n, H, K, s, u)


def cylinder_over(beta, w, dbeta=None, d2beta=None, name="cylinder") -> RuledSurface:
    """Cylindrical surface with fixed ruling direction ``w``."""
    w = _vec(w)
    return RuledSurface(beta, lambda s: w, dbeta, d2beta, mode="cylindrical", name=name)


def ruled_invariants(surface: RuledSurface, s) -> RuledInvariants:
    """Distribution parameter and its companions at ``s``.

    ``lam' `` is the exact product-rule derivative of ``<beta' ^ w, w'>``.
    """
    if surface.mode != "noncylindrical":
        raise ParamViolation("ruled invariants need a noncylindrical surface")
    surface.check(s)
    b1, b2 = surface.b1(s), surface.b2(s)
    w0, w1, w2 = surface.w0(s), surface.w1(s), surface.w2(s)
    b1w = np.cross(b1, w0)
    lam = float(np.dot(b1w, w1))
    lam_p = float(np.dot(np.cross(b2, w0), w1) + np.dot(b1w, w2))
    F = float(np.dot(b1, w0))
    J = float(np.dot(np.cross(w0, w1), w2))
    return RuledInvariants(lam, lam_p, F, J)


def ruled_normal(surface: RuledSurface, s, u) -> Vec:
    inv = ruled_invariants(surface, s)
    q = inv.lam**2 + u**2
    if q == 0.0:
        raise Singular(f"lambda = u = 0 at s={s}")
    w0, w1 = surface.w0(s), surface.w1(s)
    return (inv.lam * w1 + u * np.cross(w1, w0)) / np.sqrt(q)


def ruled_mean_curvature(surface: RuledSurface, s, u) -> float:
    inv = ruled_invariants(surface, s)
    lam = inv.lam
    q = lam**2 + u**2
    if q == 0.0:
        raise Singular(f"lambda = u = 0 at s={s}")
    num = lam * inv.F + lam**2 * inv.J + u * inv.lam_prime + u**2 * inv.J
    return -num / (2.0 * q**1.5)


def ruled_gauss_curvature(surface: RuledSurface, s, u) -> float:
    lam = ruled_invariants(surface, s).lam
    q = lam**2 + u**2
    if q == 0.0:
        raise Singular(f"lambda = u = 0 at s={s}")
    return -(lam**2) / q**2


def _cyl_cross(surface: RuledSurface, s):
    b1 = surface.b1(s)
    w = surface.w0(s)
    bw = np.cross(b1, w)
    den2 = float(np.dot(bw, bw))  # = |beta'|^2 |w|^2 - <beta',w>^2
    scale = max(1.0, float(np.dot(b1, b1)) * float(np.dot(w, w)))
    if den2 <= 1e-14 * scale:
        raise Degenerate(f"beta' parallel to w at s={s}")
    return b1, w, bw, den2


def cylindrical_normal(surface: RuledSurface, s) -> Vec:
    _, _, bw, den2 = _cyl_cross(surface, s)
    return bw / np.sqrt(den2)


def cylindrical_mean_curvature(surface: RuledSurface, s) -> float:
    """``<beta'', beta' ^ w> / (2 (|beta'|^2 - F^2)^{3/2})`` for unit ``w``.

    For a non-unit ruling the true first fundamental form carries ``G = |w|^2``;
    that factor is kept so the value is the geometric mean curvature either way.
    """
    _, w, bw, den2 = _cyl_cross(surface, s)
    return float(np.dot(w, w)) * float(np.dot(surface.b2(s), bw)) / (2.0 * den2**1.5)


# ---------------------------------------------------------------------------
# Conical surfaces X(s, u) = P + u w(s)


@dataclass(frozen=True)
class ConicalSurface:
    """Cone with apex ``apex`` over the spherical curve ``w``.

    The normal is ``w' ^ w / |w'|`` for every ``u``; on the ``u < 0`` nappe it
    is the negative of ``X_s ^ X_u`` normalized.
    """

    apex: Vec
    w: VecFn
    dw: Optional[VecFn] = None
    d2w: Optional[VecFn] = None
    tol: float = TOL_PARAM
    name: str = field(default="cone", compare=False)

    def w0(self, s):
        return _vec(self.w(s))

    def w1(self, s):
        return _vec(self.dw(s) if self.dw else central_diff(self.w, s))

    def w2(self, s):
        return _vec(self.d2w(s) if self.d2w else central_diff2(self.w, s))

    def point(self, s, u):
        return _vec(self.apex) + u * self.w0(s)

    def tangents(self, s, u):
        return u * self.w1(s), self.w0(s)

    def check(self, s):
        if abs(np.linalg.norm(self.w0(s)) - 1.0) > self.tol:
            raise ParamViolation(f"conical mode needs |w| = 1 at s={s}")
        if np.linalg.norm(self.w1(s)) <= self.tol:
            raise ParamViolation(f"conical mode needs w' != 0 at s={s}")

    def normal(self, s):
        self.check(s)
        w0, w1 = self.w0(s), self.w1(s)
        return np.cross(w1, w0) / np.linalg.norm(w1)

    def sample(self, s, u) -> SurfaceSample:
        return SurfaceSample(self.point(s, u), self.normal(s), conical_mean_curvature(self, s, u), 0.0, s, u)


def conical_mean_curvature(surface: ConicalSurface, s, u) -> float:
    if u == 0:
        raise Singular("conical mean curvature is undefined at the apex (u = 0)")
    surface.check(s)
    w0, w1, w2 = surface.w0(s), surface.w1(s), surface.w2(s)
    n1 = np.linalg.norm(w1)
    return float(np.dot(w2, np.cross(w1, w0))) / (2.0 * u * n1**3)


# ---------------------------------------------------------------------------
# Surfaces of revolution X(u, s) = (phi cos u, phi sin u, psi)


@dataclass(frozen=True)
class RevolutionSurface:
    phi: ScalarFn
    psi: ScalarFn
    dphi: Optional[ScalarFn] = None
    d2phi: Optional[ScalarFn] = None
    dpsi: Optional[ScalarFn] = None
    d2psi: Optional[ScalarFn] = None
    name: str = field(default="revolution", compare=False)

    def jet(self, s):
        """(phi, psi, phi', psi', phi'', psi'') at ``s``."""
        p = float(self.phi(s))
        q = float(self.psi(s))
        p1 = float(self.dphi(s) if self.dphi else central_diff(self.phi, s))
        q1 = float(self.dpsi(s) if self.dpsi else central_diff(self.psi, s))
        p2 = float(self.d2phi(s) if self.d2phi else central_diff2(self.phi, s))
        q2 = float(self.d2psi(s) if self.d2psi else central_diff2(self.psi, s))
        return p, q, p1, q1, p2, q2

    def point(self, s, u):
        p, q = float(self.phi(s)), float(self.psi(s))
        return np.array([p * np.cos(u), p * np.sin(u), q])

    def tangents(self, s, u):
        p, _, p1, q1, _, _ = self.jet(s)
        xs = np.array([p1 * np.cos(u), p1 * np.sin(u), q1])
        xu = np.array([-p * np.sin(u), p * np.cos(u), 0.0])
        return xs, xu

    def sample(self, s, u) -> SurfaceSample:
        return SurfaceSample(
            self.point(s, u),
            revolution_normal(self, s, u),
            revolution_mean_curvature(self, s),
            revolution_gauss_curvature(self, s),
            s,
            u,
        )


def _speed2(p1, q1, s):
    g = p1 * p1 + q1 * q1
    if g == 0.0:
        raise Singular(f"profile curve is not regular at s={s}")
    return g


def revolution_normal(surface: RevolutionSurface, s, u) -> Vec:
    _, _, p1, q1, _, _ = surface.jet(s)
    g = _speed2(p1, q1, s)
    return np.array([q1 * np.cos(u), q1 * np.sin(u), -p1]) / np.sqrt(g)


def revolution_mean_curvature(surface: RevolutionSurface, s) -> float:
    p, _, p1, q1, p2, q2 = surface.jet(s)
    if p <= 0.0:
        raise Singular(f"phi = {p} <= 0 at s={s}")
    g = _speed2(p1, q1, s)
    return (p * (p2 * q1 - p1 * q2) - q1 * g) / (2.0 * p * g**1.5)


def revolution_gauss_curvature(surface: RevolutionSurface, s) -> float:
    p, _, p1, q1, p2, q2 = surface.jet(s)
    if p <= 0.0:
        raise Singular(f"phi = {p} <= 0 at s={s}")
    g = _speed2(p1, q1, s)
    return (-(q1**2) * p2 + p1 * q1 * q2) / (p * g**2)


# ---------------------------------------------------------------------------
# Plane curves in the (y, z) plane: alpha = (0, phi, psi)


def frame_from_jet(p1, q1, p2, q2) -> CurveFrame:
    """Frame of ``(0, phi, psi)``: tau = alpha', eta = (0, psi', -phi')."""
    g = _speed2(p1, q1, None)
    kappa = (p2 * q1 - q2 * p1) / g**1.5
    return CurveFrame(np.array([0.0, p1, q1]), np.array([0.0, q1, -p1]), float(kappa))


def curve_frame(curve, s) -> CurveFrame:
    """Tangent, normal and signed curvature of a plane profile at ``s``.

    ``curve`` is either a :class:`RevolutionSurface` (its profile is used)
    or a :class:`~mcf_solitons.profile.SampledCurve`; for the latter the
    nearest sample is used with circumcircle curvature.
    """
    if isinstance(curve, RevolutionSurface):
        _, _, p1, q1, p2, q2 = curve.jet(s)
        return frame_from_jet(p1, q1, p2, q2)
    i = int(np.argmin(np.abs(np.asarray(curve.s) - s)))
    t = curve.tangent[i]
    return CurveFrame(np.array([0.0, t[0], t[1]]), np.array([0.0, t[1], -t[0]]), float(curve.kappa[i]))
