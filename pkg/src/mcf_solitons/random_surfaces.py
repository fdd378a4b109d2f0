"""Randomized admissible surfaces with closed-form derivatives.

The noncylindrical family rules along a rotated small circle on the unit
sphere (so ``|w'| = 1``) and builds the striction line from
``beta' = F w + lam w ^ w'`` with affine/quadratic coefficient functions,
which integrates in closed form.
"""

import numpy as np

from .geometry import ConicalSurface, RevolutionSurface, RuledSurface, cylinder_over


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def ruled_from_circle(r, g, p, M=None, offset=None, name="ruled"):
    """Noncylindrical surface with ``w`` a circle of radius ``r`` on S^2.

    In the circle's own frame ``beta' = (G cos, G sin, P)`` with
    ``G = g[0] + g[1] s`` and ``P = p[0] + p[1] s + p[2] s^2``.
    """
    M = np.eye(3) if M is None else np.asarray(M, float)
    b0 = np.zeros(3) if offset is None else np.asarray(offset, float)
    hh = np.sqrt(max(0.0, 1.0 - r * r))
    g0, g1 = g
    p0, p1, p2 = p

    def cs(s):
        return np.cos(s / r), np.sin(s / r)

    def w(s):
        c, n = cs(s)
        return M @ np.array([r * c, r * n, hh])

    def dw(s):
        c, n = cs(s)
        return M @ np.array([-n, c, 0.0])

    def d2w(s):
        c, n = cs(s)
        return M @ np.array([-c / r, -n / r, 0.0])

    def beta(s):
        c, n = cs(s)
        G = g0 + g1 * s
        return b0 + M @ np.array(
            [G * r * n + g1 * r * r * c, -G * r * c + g1 * r * r * n, p0 * s + p1 * s**2 / 2 + p2 * s**3 / 3]
        )

    def dbeta(s):
        c, n = cs(s)
        G = g0 + g1 * s
        return M @ np.array([G * c, G * n, p0 + p1 * s + p2 * s**2])

    def d2beta(s):
        c, n = cs(s)
        G = g0 + g1 * s
        return M @ np.array([g1 * c - G * n / r, g1 * n + G * c / r, p1 + 2 * p2 * s])

    return RuledSurface(beta, w, dbeta, d2beta, dw, d2w, name=name)


def random_ruled(rng):
    r = rng.uniform(0.3, 1.0)
    g = rng.uniform(-1.0, 1.0, 2)
    p = rng.uniform(-1.0, 1.0, 3)
    return ruled_from_circle(r, g, p, random_rotation(rng), rng.normal(size=3), name="random-ruled")


def helicoid(h=1.0):
    """``beta = (0, 0, h s)``, ``w = (cos s, sin s, 0)``; distribution parameter ``h``."""
    return RuledSurface(
        lambda s: np.array([0.0, 0.0, h * s]),
        lambda s: np.array([np.cos(s), np.sin(s), 0.0]),
        lambda s: np.array([0.0, 0.0, h]),
        lambda s: np.zeros(3),
        lambda s: np.array([-np.sin(s), np.cos(s), 0.0]),
        lambda s: np.array([-np.cos(s), -np.sin(s), 0.0]),
        name="helicoid",
    )


def _trig(rng, n=2):
    a = rng.normal(scale=0.4, size=n)
    k = rng.uniform(0.5, 2.0, n)
    ph = rng.uniform(0, 2 * np.pi, n)
    f = lambda s: float(np.sum(a * np.sin(k * s + ph)))
    d1 = lambda s: float(np.sum(a * k * np.cos(k * s + ph)))
    d2 = lambda s: float(np.sum(-a * k * k * np.sin(k * s + ph)))
    return f, d1, d2


def random_cylindrical(rng):
    """Cylinder over a random space curve with a random unit ruling."""
    comps = [_trig(rng) for _ in range(3)]
    lin = rng.normal(size=3)
    beta = lambda s: np.array([f(s) for f, _, _ in comps]) + lin * s
    dbeta = lambda s: np.array([d(s) for _, d, _ in comps]) + lin
    d2beta = lambda s: np.array([dd(s) for _, _, dd in comps])
    w = rng.normal(size=3)
    return cylinder_over(beta, w / np.linalg.norm(w), dbeta, d2beta, name="random-cylinder")


def spherical_curve(th, dth, d2th, ph, dph, d2ph):
    """``w = (cos th cos ph, cos th sin ph, sin th)`` and its derivatives."""

    def w(s):
        t, p = th(s), ph(s)
        return np.array([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), np.sin(t)])

    def w_t(t, p):
        return np.array([-np.sin(t) * np.cos(p), -np.sin(t) * np.sin(p), np.cos(t)])

    def w_p(t, p):
        return np.array([-np.cos(t) * np.sin(p), np.cos(t) * np.cos(p), 0.0])

    def dw(s):
        t, p = th(s), ph(s)
        return dth(s) * w_t(t, p) + dph(s) * w_p(t, p)

    def d2w(s):
        t, p = th(s), ph(s)
        t1, p1 = dth(s), dph(s)
        w_tt = np.array([-np.cos(t) * np.cos(p), -np.cos(t) * np.sin(p), -np.sin(t)])
        w_tp = np.array([np.sin(t) * np.sin(p), -np.sin(t) * np.cos(p), 0.0])
        w_pp = np.array([-np.cos(t) * np.cos(p), -np.cos(t) * np.sin(p), 0.0])
        return (
            d2th(s) * w_t(t, p)
            + d2ph(s) * w_p(t, p)
            + t1 * t1 * w_tt
            + 2.0 * t1 * p1 * w_tp
            + p1 * p1 * w_pp
        )

    return w, dw, d2w


def random_conical(rng):
    th, dth, d2th = _trig(rng)
    c = rng.uniform(0.5, 1.5)
    ph0, ph1, ph2 = _trig(rng)
    ph = lambda s: c * s + ph0(s)
    dph = lambda s: c + ph1(s)
    w, dw, d2w = spherical_curve(th, dth, d2th, ph, dph, ph2)
    return ConicalSurface(rng.normal(size=3), w, dw, d2w, name="random-cone")


def random_revolution(rng):
    a0 = rng.uniform(1.5, 2.5)
    a1 = rng.uniform(-0.8, 0.8)
    k = rng.uniform(0.5, 2.0)
    b1 = rng.uniform(0.5, 1.5)
    b2 = rng.uniform(-0.5, 0.5)
    return RevolutionSurface(
        lambda s: a0 + a1 * np.sin(k * s),
        lambda s: b1 * s + b2 * np.cos(k * s),
        lambda s: a1 * k * np.cos(k * s),
        lambda s: -a1 * k * k * np.sin(k * s),
        lambda s: b1 - b2 * k * np.sin(k * s),
        lambda s: -b2 * k * k * np.cos(k * s),
        name="random-revolution",
    )
