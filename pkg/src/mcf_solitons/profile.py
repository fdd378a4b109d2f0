"""Generating-curve ODEs: the arc-length revolution system and cylinder graphs.

For a unit-speed profile ``alpha = (0, phi, psi)`` the soliton condition is
the pair

    phi''  =  psi' Q,   psi'' = -phi' Q,
    Q = 2c (phi psi' - phi' psi) - 2b phi' + psi' / phi,

which conserves ``phi'^2 + psi'^2`` exactly.  The same right-hand side with
a non-unit initial speed keeps that speed and still satisfies the
curvature relation ``kappa |tau| = Q``; this is the ``literal`` mode used
for the printed initial conditions that are not unit length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import DOP853, RK45, OdeSolution
from scipy.optimize import brentq

from .curves import SampledCurve
from .errors import BadInitialSpeed, DenominatorBlowup, Singular, StepLimit, UnknownFigure
from .residual import MotionGenerators, revolution_terms

TOL_SPEED = 1e-7


@dataclass(frozen=True)
class ProfileState:
    s: float
    phi: float
    psi: float
    dphi: float
    dpsi: float

    def as_array(self):
        return np.array([self.phi, self.psi, self.dphi, self.dpsi])

    @classmethod
    def from_array(cls, s, y):
        return cls(float(s), *map(float, y))

    @property
    def speed(self):
        return math.hypot(self.dphi, self.dpsi)


@dataclass(frozen=True)
class IntegrationConfig:
    """``method``: ``"RK45"`` (adaptive, default), ``"DOP853"`` or ``"RK4"`` (fixed ``step``).

    ``tangent`` picks how a non-unit initial tangent is handled:
    ``"strict"`` raises, ``"normalize"`` rescales it, ``"literal"`` keeps it.
    """

    method: str = "RK45"
    step: float = 1e-2
    rtol: float = 1e-10
    atol: float = 1e-12
    s_min: float = 0.0
    s_max: float = 10.0
    phi_floor: float = 1e-6
    max_steps: int = 200_000
    ds_out: float = 0.01
    tangent: str = "strict"

    def __post_init__(self):
        if self.method not in ("RK45", "DOP853", "RK4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.tangent not in ("strict", "normalize", "literal"):
            raise ValueError(f"unknown tangent mode {self.tangent!r}")
        if min(self.step, self.rtol, self.atol, self.ds_out, self.phi_floor) <= 0 or self.max_steps <= 0:
            raise ValueError("steps and tolerances must be positive")
        if self.s_max < self.s_min:
            raise ValueError("s_max < s_min")


# ---------------------------------------------------------------------------
# right-hand sides


def _q_factor(phi, psi, dphi, dpsi, b, c):
    return 2.0 * c * (phi * dpsi - dphi * psi) - 2.0 * b * dphi + dpsi / phi


def revolution_rhs(state: ProfileState, b: float, c: float) -> np.ndarray:
    """``(phi', psi', phi'', psi'')`` for the revolution soliton system."""
    if state.phi <= 0.0:
        raise Singular(f"phi = {state.phi} <= 0")
    Q = _q_factor(state.phi, state.psi, state.dphi, state.dpsi, b, c)
    return np.array([state.dphi, state.dpsi, state.dpsi * Q, -state.dphi * Q])


def _rev_fun(b, c):
    def f(s, y):
        phi, psi, dphi, dpsi = y
        Q = _q_factor(phi, psi, dphi, dpsi, b, c)
        return np.array([dphi, dpsi, dpsi * Q, -dphi * Q])

    return f


# ---------------------------------------------------------------------------
# generic stepping with a terminal event


@dataclass
class _Run:
    sol: Optional[OdeSolution]
    nodes: np.ndarray
    states: np.ndarray
    s_end: float
    status: str
    nsteps: int


def _rk4_step(f, s, y, h):
    k1 = f(s, y)
    k2 = f(s + h / 2, y + h / 2 * k1)
    k3 = f(s + h / 2, y + h / 2 * k2)
    k4 = f(s + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _run(f, y0, s0, s_end, cfg: IntegrationConfig, event: Optional[Callable] = None) -> _Run:
    """Integrate from ``s0`` to ``s_end`` (either direction).

    ``event(y)`` crossing from positive to non-positive stops the run; the
    stop point is located on the dense output (adaptive) or taken at the
    last admissible node (RK4).
    """
    y0 = np.asarray(y0, dtype=float)
    if s_end == s0:
        return _Run(None, np.array([s0]), y0[None, :], s0, "s_max", 0)
    direction = 1.0 if s_end > s0 else -1.0
    nodes, states = [s0], [y0]
    if cfg.method == "RK4":
        n = int(math.ceil(abs(s_end - s0) / cfg.step - 1e-9))
        if n > cfg.max_steps:
            return _Run(None, np.array(nodes), np.array(states), s0, "max_steps", 0)
        h = (s_end - s0) / n
        y, status = y0, "s_max"
        for i in range(n):
            y = _rk4_step(f, s0 + i * h, y, h)
            if event is not None and event(y) <= 0:
                status = "singular_stop"
                break
            nodes.append(s0 + (i + 1) * h)
            states.append(y)
        return _Run(None, np.array(nodes), np.array(states), nodes[-1], status, len(nodes) - 1)

    cls = RK45 if cfg.method == "RK45" else DOP853
    solver = cls(f, s0, y0, s_end, rtol=cfg.rtol, atol=cfg.atol)
    interps, ts = [], [s0]
    status, nsteps = "s_max", 0
    while solver.status == "running":
        if nsteps >= cfg.max_steps:
            status = "max_steps"
            break
        msg = solver.step()
        nsteps += 1
        if solver.status == "failed":
            raise StepLimit(f"integrator failed at s={solver.t}: {msg}")
        dense = solver.dense_output()
        if event is not None and event(solver.y) <= 0:
            a, b = solver.t_old, solver.t
            s_hit = brentq(lambda t: event(dense(t)), a, b, xtol=1e-14)
            interps.append(dense)
            ts.append(s_hit)
            nodes.append(s_hit)
            states.append(dense(s_hit))
            status = "singular_stop"
            break
        interps.append(dense)
        ts.append(solver.t)
        nodes.append(solver.t)
        states.append(solver.y.copy())
    sol = OdeSolution(ts, interps) if interps else None
    return _Run(sol, np.array(nodes), np.array(states), nodes[-1], status, nsteps)


def _sample_run(run: _Run, s0, ds):
    """Uniform output grid from ``s0`` toward ``run.s_end`` plus the end point."""
    span = run.s_end - s0
    if span == 0.0:
        return np.array([s0]), run.states[:1]
    if run.sol is None:
        return run.nodes, run.states
    n = int(math.floor(abs(span) / ds + 1e-9))
    grid = s0 + np.sign(span) * ds * np.arange(n + 1)
    if abs(grid[-1] - run.s_end) > 1e-12:
        grid = np.append(grid, run.s_end)
    else:
        grid[-1] = run.s_end
    return grid, run.sol(grid).T


# ---------------------------------------------------------------------------
# revolution profiles


def _prepare_init(init: ProfileState, cfg: IntegrationConfig):
    sp = init.speed
    note = {}
    if sp == 0.0:
        raise BadInitialSpeed("zero initial tangent")
    if abs(sp * sp - 1.0) > TOL_SPEED:
        if cfg.tangent == "strict":
            raise BadInitialSpeed(f"initial speed {sp:.12g} is not 1 (set tangent='normalize' or 'literal')")
        note["initial_speed"] = sp
        if cfg.tangent == "normalize":
            note["tangent_normalized"] = True
            init = replace(init, dphi=init.dphi / sp, dpsi=init.dpsi / sp)
        else:
            note["tangent_normalized"] = False
    if init.phi <= cfg.phi_floor:
        raise Singular(f"phi0 = {init.phi} is below the floor {cfg.phi_floor}")
    return init, note


def integrate_revolution_profile(init: ProfileState, b: float, c: float, cfg: IntegrationConfig = IntegrationConfig()) -> SampledCurve:
    """Integrate the revolution soliton system over ``[s_min, s_max]``.

    ``s_min < init.s`` also integrates backward.  Hitting ``phi_floor`` is a
    normal stop (``singular_stop``), recorded per direction in the curve
    metadata.  Each sample carries the normalized curvature-relation
    residual, with the curvature taken by central differences of the
    tangent on the dense output (step ``1e-6``); end samples are set to 0.
    """
    init, note = _prepare_init(init, cfg)
    f = _rev_fun(b, c)
    ev = lambda y: y[0] - cfg.phi_floor
    fwd = _run(f, init.as_array(), init.s, max(cfg.s_max, init.s), cfg, ev)
    bwd = _run(f, init.as_array(), init.s, min(cfg.s_min, init.s), cfg, ev)
    ds = cfg.ds_out if cfg.method != "RK4" else cfg.step
    sf, yf = _sample_run(fwd, init.s, ds)
    sb, yb = _sample_run(bwd, init.s, ds)
    s = np.concatenate([sb[::-1], sf[1:]])
    y = np.vstack([yb[::-1], yf[1:]])

    gens = MotionGenerators(b=b, c=c)
    resid = np.zeros(len(s))
    kappa = np.empty(len(s))
    for i in range(len(s)):
        phi, psi, dphi, dpsi = y[i]
        sp = math.hypot(dphi, dpsi)
        kappa[i] = _q_factor(phi, psi, dphi, dpsi, b, c) / sp
    if cfg.method != "RK4":
        h = 1e-6
        for i in range(1, len(s) - 1):
            run = fwd if s[i] >= init.s else bwd
            ya, yb2 = run.sol(s[i] + h), run.sol(s[i] - h)
            d2 = (ya - yb2) / (2 * h)
            phi, psi, dphi, dpsi = y[i]
            k_fd = (d2[2] * dpsi - d2[3] * dphi) / math.hypot(dphi, dpsi) ** 3
            resid[i] = revolution_terms(ProfileState(s[i], phi, psi, dphi, dpsi), gens, k_fd).normalized
    else:
        for i in range(1, len(s) - 1):
            d2 = (y[i + 1] - y[i - 1]) / (s[i + 1] - s[i - 1])
            phi, psi, dphi, dpsi = y[i]
            k_fd = (d2[2] * dpsi - d2[3] * dphi) / math.hypot(dphi, dpsi) ** 3
            resid[i] = revolution_terms(ProfileState(s[i], phi, psi, dphi, dpsi), gens, k_fd).normalized

    speed0 = init.speed
    md = {
        "b": b,
        "c": c,
        "init": [init.phi, init.psi, init.dphi, init.dpsi],
        "method": cfg.method,
        "stop_forward": fwd.status,
        "stop_backward": bwd.status,
        "s_range": [float(s[0]), float(s[-1])],
        "max_speed_drift": float(np.max(np.abs(y[:, 2] ** 2 + y[:, 3] ** 2 - speed0**2))),
        "max_residual": float(np.max(np.abs(resid))),
        **note,
    }
    return SampledCurve(s, y[:, :2], y[:, 2:], kappa, metadata=md, columns={"residual": resid})


# ---------------------------------------------------------------------------
# cylinder directrix graphs (s, q(s))


@dataclass(frozen=True)
class GraphODE:
    """Reduced soliton ODE for the directrix ``(0, s, q(s))``.

    ``kind``:
      * ``"custom"`` -- the full Item I equation with ``h = s`` and
        ruling ``(x0, y0, z0)`` taken as printed (no normalization);
      * ``"item_i_reduced"`` -- ``a = c = 0``, ``z0 = 0``:
        ``2 b y0 q' = x0 q'' / (1 + q'^2 - y0^2)``;
      * ``"grim_reaper"`` -- ``-q'' = 1 + (3/4) q'^2``.
    """

    kind: str = "custom"
    a: float = 0.0
    b: float = 0.5
    c: float = 0.0
    x0: float = -1.0
    y0: float = 1.0
    z0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("custom", "item_i_reduced", "grim_reaper"):
            raise ValueError(f"unknown graph ODE {self.kind!r}")
        if self.kind != "grim_reaper" and self.x0 == 0.0:
            raise ValueError("x0 = 0 leaves q'' undetermined")

    def denominator(self, s, q, dq):
        if self.kind == "grim_reaper":
            return 1.0
        if self.kind == "item_i_reduced":
            return 1.0 + dq * dq - self.y0**2
        return 1.0 + dq * dq - (self.y0 + self.z0 * dq) ** 2

    def d2q(self, s, q, dq):
        if self.kind == "grim_reaper":
            return -(1.0 + 0.75 * dq * dq)
        den = self.denominator(s, q, dq)
        if self.kind == "item_i_reduced":
            return 2.0 * self.b * self.y0 * dq * den / self.x0
        lhs = (
            2 * self.c * self.x0 * (s * dq - q)
            + 2 * self.b * (self.z0 - self.y0 * dq)
            - 2 * self.a * self.x0 * (q * dq + s)
        )
        return -lhs * den / self.x0


GRIM_REAPER = GraphODE("grim_reaper")


def integrate_cylindrical_graph(ode: GraphODE, q0: float, dq0: float, cfg: IntegrationConfig = IntegrationConfig(), s0: float = 0.0, den_floor: float = 1e-8) -> SampledCurve:
    """Integrate the graph ODE from ``(s0, q0, q0')`` over ``[s_min, s_max]``.

    The returned curve has points ``(s, q)`` and tangent ``(1, q')``.
    Raises :class:`DenominatorBlowup` if ``1 + q'^2 - (y0 + z0 q')^2``
    falls to ``den_floor`` and :class:`StepLimit` past ``max_steps``.
    """
    f = lambda s, y: np.array([y[1], ode.d2q(s, y[0], y[1])])
    if ode.denominator(s0, q0, dq0) <= den_floor:
        raise DenominatorBlowup(f"denominator <= {den_floor} at the initial point")
    ev = None if ode.kind == "grim_reaper" else (lambda y: ode.denominator(None, y[0], y[1]) - den_floor)
    runs = []
    for end in (max(cfg.s_max, s0), min(cfg.s_min, s0)):
        run = _run(f, [q0, dq0], s0, end, cfg, ev)
        if run.status == "singular_stop":
            raise DenominatorBlowup(f"denominator reached {den_floor} at s={run.s_end:.12g}")
        if run.status == "max_steps":
            raise StepLimit(f"more than {cfg.max_steps} steps")
        runs.append(run)
    ds = cfg.ds_out if cfg.method != "RK4" else cfg.step
    sf, yf = _sample_run(runs[0], s0, ds)
    sb, yb = _sample_run(runs[1], s0, ds)
    s = np.concatenate([sb[::-1], sf[1:]])
    y = np.vstack([yb[::-1], yf[1:]])
    d2 = np.array([ode.d2q(si, qi, dqi) for si, (qi, dqi) in zip(s, y)])
    if ode.kind == "custom":
        den = np.array([ode.denominator(si, qi, dqi) for si, (qi, dqi) in zip(s, y)])
        if np.any(den <= den_floor):
            raise DenominatorBlowup("denominator vanished along the trajectory")
    tangent = np.column_stack([np.ones_like(s), y[:, 1]])
    kappa = -d2 / (1.0 + y[:, 1] ** 2) ** 1.5
    md = {"ode": ode.kind, "params": [ode.a, ode.b, ode.c, ode.x0, ode.y0, ode.z0], "s0": s0, "init": [q0, dq0]}
    return SampledCurve(s, np.column_stack([s, y[:, 0]]), tangent, kappa, metadata=md, columns={"d2q": d2})


# ---------------------------------------------------------------------------
# figure presets


@dataclass(frozen=True)
class FigurePreset:
    number: int
    b: float
    c: float
    init: tuple  # (phi0, psi0, dphi0, dpsi0) as printed
    label: str
    s_range: tuple = (-5.0, 5.0)

    def state(self) -> ProfileState:
        return ProfileState(0.0, *self.init)


_PRESETS = {
    1: (1.0, 0.0, (1.0, 0.0, math.sqrt(0.75), math.sqrt(0.25)), "translating"),
    2: (1.0, 1.0, (1.0, 0.0, 1.0, 0.0), "translating and expanding"),
    3: (1.0, -2.0, (1.0, 0.0, 1.0, 0.0), "translating and shrinking"),
    4: (1.0, -1.0, (1.0, 0.0, 1.0, 1.0), "translating and shrinking"),
    5: (0.0, -2.0, (1.0, 0.0, 0.0, 1.0), "shrinking"),
    6: (0.0, 2.0, (1.0, 0.0, 0.0, 1.0), "expanding"),
    7: (1.0, -4.0, (1.0, 1.0, 1.0, 1.0), "translating and shrinking"),
    8: (1.0, -4.0, (0.5, 0.5, -1.0, 1.0), "translating and shrinking"),
    9: (0.0, -6.0, (1.0, 0.0, 0.0, 1.0), "shrinking"),
    10: (0.0, -2.0, (1.0, 1.0, 0.0, 1.0), "shrinking"),
}


def figure_preset(n: int) -> FigurePreset:
    try:
        b, c, init, label = _PRESETS[int(n)]
    except (KeyError, ValueError, TypeError):
        raise UnknownFigure(f"figure {n!r} is not one of 1..10") from None
    return FigurePreset(int(n), b, c, init, label)


def classify_motion(b: float, c: float) -> str:
    """Label from signs: ``b != 0`` translates, ``c < 0`` shrinks, ``c > 0`` expands."""
    parts = []
    if b != 0:
        parts.append("translating")
    if c < 0:
        parts.append("shrinking")
    elif c > 0:
        parts.append("expanding")
    return " and ".join(parts) if parts else "static"


def run_preset(n: int, literal: bool = False, cfg: Optional[IntegrationConfig] = None) -> SampledCurve:
    """Integrate figure ``n`` over its plotting range.

    The tangent is normalized unless ``literal`` is set, in which case the
    printed (possibly non-unit) initial tangent is integrated as is.
    """
    p = figure_preset(n)
    base = cfg or IntegrationConfig()
    cfg = replace(base, s_min=p.s_range[0], s_max=p.s_range[1], tangent="literal" if literal else "normalize")
    curve = integrate_revolution_profile(p.state(), p.b, p.c, cfg)
    curve.metadata.update(
        figure=p.number,
        label=p.label,
        classification=classify_motion(p.b, p.c),
        printed_init=list(p.init),
        mode="literal" if literal else "normalized",
    )
    return curve
