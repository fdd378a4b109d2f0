"""Short-time MCF of profile curves and homothety fits for self-similarity.

Two families are evolved in their profile plane:

* ``"revolution"`` -- points ``(phi, psi)`` of ``alpha = (0, phi, psi)``;
  the speed is the surface mean curvature ``kappa/2 - psi'/(2 phi)``;
* ``"cylindrical"`` -- a cross-section ``(y, z)`` of a cylinder ruled
  orthogonally to its plane; the speed is ``kappa/2``.

Points move by ``H`` along ``eta = (psi', -phi')`` (explicit Euler), the
same orientation used for the surface normals, and are periodically
redistributed uniformly in arc length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curves import SampledCurve, chord_lengths, circumcircle_curvature, discrete_tangent, resample_arclength
from .errors import CFLViolation, DegenerateFit

CFL = 0.4


@dataclass(frozen=True)
class HomotheticMotion:
    sigma: float = 1.0
    xi: float = 0.0
    zeta: float = 0.0
    axis: str = "Z"
    direction: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def apply(self, pts):
        """Act on profile-plane points; dilation is about the origin."""
        p = np.asarray(pts, dtype=float)
        c, s = math.cos(self.xi), math.sin(self.xi)
        rot = np.array([[c, -s], [s, c]])
        return self.sigma * p @ rot.T + self.zeta * np.asarray(self.direction, dtype=float)


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 1e-4
    n_steps: int = 1000
    n_samples: int = 200
    resample_every: int = 10
    snapshot_every: int = 100
    phi_floor: float = 1e-6
    # central arc-length fraction of open snapshots used by the fit; the
    # free ends carry a boundary layer that does not refine away
    core: float = 0.5

    def __post_init__(self):
        if self.dt <= 0 or self.n_steps < 0 or self.n_samples < 3 or not 0 < self.core <= 1:
            raise ValueError("invalid flow configuration")


@dataclass
class FlowRun:
    snapshots: list = field(default_factory=list)
    times: list = field(default_factory=list)
    status: str = "completed"

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self):
        return len(self.snapshots)


def normal_speed(points, family: str, closed: bool):
    """Mean curvature and unit normal ``eta`` at every sample."""
    k = circumcircle_curvature(points, closed)
    t = discrete_tangent(points, closed)
    eta = np.column_stack([t[:, 1], -t[:, 0]])
    if family == "revolution":
        H = k / 2 - t[:, 1] / (2 * points[:, 0])
    elif family == "cylindrical":
        H = k / 2
    else:
        raise ValueError(f"unknown family {family!r}")
    return H, eta, k


def _snap(pts, closed, t, base_md):
    c = SampledCurve.from_points(pts, closed, metadata={**base_md, "t": t})
    return c


def evolve_profile(curve: SampledCurve, family: str, cfg: FlowConfig = FlowConfig()) -> FlowRun:
    """Explicit-Euler MCF of a profile curve.

    Returns snapshots at ``t = 0`` and every ``snapshot_every`` steps (plus
    the final time).  ``status`` is ``"completed"`` or ``"singular_stop"``
    (``phi`` reached the floor, or ``|kappa| > 1/(10 dt)``).
    """
    if family not in ("revolution", "cylindrical"):
        raise ValueError(f"unknown family {family!r}")
    cur = resample_arclength(curve, cfg.n_samples)
    closed = cur.closed
    pts = cur.points.copy()
    md = {"family": family}
    if family == "revolution" and np.any(pts[:, 0] <= cfg.phi_floor):
        raise ValueError("profile touches the rotation axis")

    def check_cfl(p):
        h = SampledCurve.from_points(p, closed).min_spacing()
        if cfg.dt > CFL * h * h:
            raise CFLViolation(f"dt={cfg.dt:g} exceeds {CFL}*h^2={CFL * h * h:.3e} (h={h:.3e})")

    check_cfl(pts)
    run = FlowRun()
    run.snapshots.append(_snap(pts, closed, 0.0, md))
    run.times.append(0.0)
    for step in range(1, cfg.n_steps + 1):
        H, eta, k = normal_speed(pts, family, closed)
        if np.max(np.abs(k)) > 1.0 / (10.0 * cfg.dt):
            run.status = "singular_stop"
            break
        pts = pts + cfg.dt * H[:, None] * eta
        if family == "revolution" and np.any(pts[:, 0] <= cfg.phi_floor):
            run.status = "singular_stop"
            break
        t = step * cfg.dt
        if step % cfg.resample_every == 0:
            pts = resample_arclength(SampledCurve.from_points(pts, closed), cfg.n_samples).points
            check_cfl(pts)
        if step % cfg.snapshot_every == 0 or step == cfg.n_steps:
            run.snapshots.append(_snap(pts, closed, t, md))
            run.times.append(t)
    if run.status != "completed" and run.times[-1] != (step - 1) * cfg.dt:
        run.snapshots.append(_snap(pts, closed, (step - 1) * cfg.dt, md))
        run.times.append((step - 1) * cfg.dt)
    return run


# ---------------------------------------------------------------------------
# homothety fitting


def _closest_on_polyline(q, poly, closed):
    """Closest points of ``q`` on the polyline ``poly``.

    Returns segment index, clamped parameter and the raw (unclamped)
    parameter for every query point.
    """
    a = poly if not closed else poly
    b = np.roll(poly, -1, axis=0) if closed else poly[1:]
    a = a if closed else poly[:-1]
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    rel = q[:, None, :] - a[None, :, :]
    lam_raw = np.einsum("kij,ij->ki", rel, d) / dd[None, :]
    lam = np.clip(lam_raw, 0.0, 1.0)
    diff = rel - lam[:, :, None] * d[None, :, :]
    dist2 = np.einsum("kij,kij->ki", diff, diff)
    k = np.argmin(dist2, axis=1)
    idx = np.arange(len(q))
    return k, lam[idx, k], lam_raw[idx, k], a, d


def central_part(points, frac):
    """Samples of an open polyline inside its central ``frac`` of arc length."""
    if frac >= 1:
        return points
    s = np.concatenate([[0.0], np.cumsum(chord_lengths(points))])
    lo, hi = 0.5 * (1 - frac) * s[-1], 0.5 * (1 + frac) * s[-1]
    return points[(s >= lo) & (s <= hi)]


def _matched_guess(q, ref, axis, dvec):
    """Linear fit pairing the curves by normalized arc length."""
    fq = np.concatenate([[0.0], np.cumsum(chord_lengths(q))])
    fr = np.concatenate([[0.0], np.cumsum(chord_lengths(ref))])
    f = np.linspace(0.0, 1.0, 200)
    qq = np.column_stack([np.interp(f, fq / fq[-1], q[:, i]) for i in range(2)])
    pp = np.column_stack([np.interp(f, fr / fr[-1], ref[:, i]) for i in range(2)])
    rows_x = [pp[:, 0], -pp[:, 1], np.full(len(f), dvec[0])]
    rows_y = [pp[:, 1], pp[:, 0], np.full(len(f), dvec[1])]
    A = np.vstack([np.column_stack(rows_x), np.column_stack(rows_y)])
    rhs = np.concatenate([qq[:, 0], qq[:, 1]])
    if axis == "Z":
        A = A[:, [0, 2]]
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    a, b, z = (sol[0], 0.0, sol[1]) if axis == "Z" else sol
    sigma = math.hypot(a, b)
    if not sigma > 0:
        return np.array([1.0, 0.0, 0.0])
    return np.array([sigma, math.atan2(b, a), z])


def fit_homothety(snapshot: SampledCurve, reference: SampledCurve, axis: str = "Z", direction=(0.0, 1.0), max_iter=100, tol=1e-15, core=1.0):
    """Least-squares ``(sigma, xi, zeta)`` taking ``reference`` onto ``snapshot``.

    Minimizes the mean squared distance from snapshot samples to the
    transformed reference polyline (point-to-segment Gauss-Newton).  For
    ``axis="Z"`` the rotation is about the symmetry axis and has no effect
    on the profile, so only ``sigma`` and ``zeta`` are fitted.  Directions
    the data cannot see (e.g. rotating a round circle) are left at the
    identity by the minimum-norm step.  Snapshot samples projecting past
    the ends of an open reference are ignored, and ``core < 1`` restricts
    an open snapshot to its central arc-length fraction.

    Returns ``(HomotheticMotion, rms_distance)``.
    """
    if len(snapshot) < 10 or len(reference) < 10:
        raise DegenerateFit("need at least 10 samples on both curves")
    if axis not in ("Z", "X"):
        raise ValueError("axis must be 'Z' or 'X'")
    q = snapshot.points
    ref = reference.points
    closed = reference.closed
    dvec = np.asarray(direction, dtype=float)
    theta = np.array([1.0, 0.0, 0.0])  # sigma, xi, zeta
    if not closed and not snapshot.closed:
        q = central_part(q, core)
        if len(q) < 10:
            raise DegenerateFit("need at least 10 samples in the fitted core")
        theta = _matched_guess(q, central_part(ref, core), axis, dvec)
    free = [0, 2] if axis == "Z" else [0, 1, 2]

    def transform(th, p):
        c, s = math.cos(th[1]), math.sin(th[1])
        rot = np.array([[c, -s], [s, c]])
        return th[0] * p @ rot.T + th[2] * dvec

    def residuals(th):
        poly = transform(th, ref)
        k, lam, lam_raw, a, d = _closest_on_polyline(q, poly, closed)
        keep = np.ones(len(q), dtype=bool)
        if not closed:
            keep &= ~((k == 0) & (lam_raw < -1e-9))
            keep &= ~((k == len(d) - 1) & (lam_raw > 1 + 1e-9))
        c_pts = a[k] + lam[:, None] * d[k]
        seg = d[k] / np.linalg.norm(d[k], axis=1)[:, None]
        n = np.column_stack([seg[:, 1], -seg[:, 0]])
        diff = q - c_pts
        r = np.einsum("ij,ij->i", diff, n)
        dist = np.linalg.norm(diff, axis=1)
        # preimage on the reference polyline
        ra = ref if closed else ref[:-1]
        rb = np.roll(ref, -1, axis=0) if closed else ref[1:]
        pstar = ra[k] + lam[:, None] * (rb[k] - ra[k])
        return r[keep], dist[keep], n[keep], pstar[keep]

    def cost(th):
        return float(np.mean(residuals(th)[1] ** 2))

    mu = 1e-3
    for _ in range(max_iter):
        r, dist, n, p = residuals(theta)
        if len(r) < len(free):
            raise DegenerateFit("too few snapshot samples project onto the reference")
        if np.max(dist, initial=0.0) <= tol:
            break
        c, s = math.cos(theta[1]), math.sin(theta[1])
        rot = np.array([[c, -s], [s, c]])
        drot = np.array([[-s, -c], [c, -s]])
        cols = [p @ rot.T, theta[0] * p @ drot.T, np.broadcast_to(dvec, p.shape)]
        J = -np.column_stack([np.einsum("ij,ij->i", cols[j], n) for j in free])
        if not np.all(np.isfinite(J)) or np.linalg.matrix_rank(J) == 0:
            raise DegenerateFit("normal system is singular")
        c0 = float(np.mean(dist**2))
        # damped steps; undamped (minimum-norm) once close
        accepted = False
        for _ in range(30):
            A = np.vstack([J, math.sqrt(mu) * np.eye(len(free))]) if mu > 1e-12 else J
            rhs = np.concatenate([-r, np.zeros(len(free))]) if mu > 1e-12 else -r
            step, *_ = np.linalg.lstsq(A, rhs, rcond=1e-10)
            trial = theta.copy()
            trial[free] += step
            if trial[0] > 0 and cost(trial) <= c0:
                theta, accepted = trial, True
                mu = max(mu / 10, 1e-13)
                break
            mu *= 10
        if not accepted or np.max(np.abs(step)) < 1e-14:
            break
    r, dist, _, _ = residuals(theta)
    rms = float(np.sqrt(np.mean(dist**2)))
    return HomotheticMotion(float(theta[0]), float(theta[1]), float(theta[2]), axis, tuple(map(float, dvec))), rms


def self_similarity_report(reference: SampledCurve, family: str, cfg: FlowConfig, axis: str = "Z", tol: float = 5e-3, direction=(0.0, 1.0), name: str = "") -> dict:
    """Evolve ``reference`` and fit a homothety to every snapshot.

    Verdict is ``"PASS"`` when every fit residual is at most ``tol``.
    """
    run = evolve_profile(reference, family, cfg)
    ref0 = run.snapshots[0]
    rows = []
    for t, snap in zip(run.times, run.snapshots):
        m, rms = fit_homothety(snap, ref0, axis, direction, core=cfg.core)
        rows.append({"t": t, "sigma": m.sigma, "xi": m.xi, "zeta": m.zeta, "fit_residual": rms})
    ok = run.status == "completed" and all(r["fit_residual"] <= tol for r in rows)
    return {
        "name": name,
        "family": family,
        "axis": axis,
        "direction": list(map(float, direction)),
        "config": {
            "dt": cfg.dt,
            "n_steps": cfg.n_steps,
            "n_samples": cfg.n_samples,
            "resample_every": cfg.resample_every,
            "snapshot_every": cfg.snapshot_every,
            "core": cfg.core,
        },
        "status": run.status,
        "tolerance": tol,
        "series": rows,
        "verdict": "PASS" if ok else "FAIL",
        "_run": run,
    }
