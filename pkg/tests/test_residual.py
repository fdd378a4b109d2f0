import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcf_solitons.acceptance import great_circle_cone, trivial_item_I, trivial_item_II
from mcf_solitons.catalog import grim_reaper, grim_reaper_unit, sol2
from mcf_solitons.errors import Degenerate, ParamViolation
from mcf_solitons.geometry import (
    ConicalSurface,
    RevolutionSurface,
    conical_mean_curvature,
    cylinder_over,
    cylindrical_mean_curvature,
    ruled_invariants,
)
from mcf_solitons.profile import ProfileState
from mcf_solitons.random_surfaces import helicoid, random_conical, random_revolution, random_ruled, ruled_from_circle
from mcf_solitons.residual import (
    MotionGenerators,
    PlaneCurveJet,
    ResidualReport,
    conical_residual_system,
    cylindrical_residuals_I,
    cylindrical_residuals_II,
    motion_field,
    noncylindrical_coefficients,
    noncylindrical_quartic,
    pointwise_residual,
    residual_grid,
    revolution_residual_at,
    revolution_soliton_residual,
    shrinking_cylinder_rate,
)

seeds = st.integers(0, 2**32 - 1)
coef = st.floats(-3, 3, allow_nan=False)


def cylinder(r):
    return RevolutionSurface(lambda s: r, lambda s: s, lambda s: 0.0, lambda s: 0.0, lambda s: 1.0, lambda s: 0.0)


# -- motion field -------------------------------------------------------------


def test_motion_field_examples():
    np.testing.assert_array_equal(motion_field([1.3, -2.0, 0.5], MotionGenerators()), [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(motion_field([1.0, 0.0, 0.0], MotionGenerators(a=1.0, axis="Z")), [0.0, 1.0, 0.0])
    np.testing.assert_array_equal(motion_field([1.0, 1.0, 1.0], MotionGenerators(a=0.0, b=2.0, c=3.0, axis="X")), [5.0, 3.0, 3.0])


def test_axis_x_rotation_turns_y_into_z():
    np.testing.assert_array_equal(motion_field([0.0, 1.0, 0.0], MotionGenerators(a=1.0, axis="X")), [0.0, 0.0, 1.0])


def test_bad_axis_rejected():
    with pytest.raises(ValueError):
        MotionGenerators(axis="Y")


@given(coef, st.sampled_from(["Z", "X"]), st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3))
def test_rotation_does_no_radial_work(a, axis, v):
    g = MotionGenerators(a=a, axis=axis)
    v = np.array(v)
    assert abs(g.gamma @ v @ v) <= 1e-12 * max(1.0, v @ v)


@given(coef, coef, coef, st.sampled_from(["Z", "X"]))
def test_motion_field_is_affine(a, b, c, axis):
    g = MotionGenerators(a=a, b=b, c=c, axis=axis)
    x, y = np.array([0.3, -1.0, 2.0]), np.array([1.5, 0.2, -0.7])
    lhs = motion_field(x + y, g) - motion_field(y, g)
    np.testing.assert_allclose(lhs, motion_field(x, g) - motion_field(np.zeros(3), g), atol=1e-12)


# -- pointwise residual and grids ------------------------------------------------


def test_helicoid_zero_gens_grid():
    rep = residual_grid(helicoid(1.0), MotionGenerators(), (-2, 2), (-2, 2), (21, 11))
    assert rep.max_abs <= 1e-12
    assert len(rep.samples) == 21 * 11


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_cylinder_shrinker_grid(r):
    rep = residual_grid(cylinder(r), MotionGenerators(c=-1 / (2 * r * r)), (-2, 2), (0, 2 * np.pi), (20, 12))
    assert rep.max_abs <= 1e-12


def test_grim_reaper_unit_grid():
    e = grim_reaper_unit()
    rep = residual_grid(e.surface, e.gens, (-1.5, 1.5), (-2, 2), (50, 10))
    assert rep.max_abs <= 1e-9


def test_literal_grim_reaper_fails_pointwise_but_passes_graph_ode():
    # the printed ruling is not unit length; only the reduced equation holds
    e = grim_reaper()
    rep = residual_grid(e.surface, e.gens, (0.2, 0.8), (0.0, 0.0), (7, 1))
    assert rep.max_abs > 1e-3
    r_alg, r_ode = cylindrical_residuals_I(e.jet(np.linspace(0.1, 1.7, 161)), e.w, e.gens, allow_unnormalized_w=True)
    assert np.max(np.abs(r_ode)) <= 1e-9 and np.max(np.abs(r_alg)) == 0.0


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_grid_max_equals_max_of_pointwise(seed):
    rng = np.random.default_rng(seed)
    surf = random_ruled(rng)
    g = MotionGenerators(*rng.uniform(-1, 1, 3), axis="Z")
    rep = residual_grid(surf, g, (-1, 1), (-1, 1), (5, 4))
    direct = [abs(pointwise_residual(surf.sample(s, u), g)) for s in np.linspace(-1, 1, 5) for u in np.linspace(-1, 1, 4)]
    assert rep.max_abs == max(direct)
    np.testing.assert_allclose(rep.l2, np.sqrt(np.sum(np.square(direct))), rtol=1e-14)


def test_report_merge_and_serialization():
    a = ResidualReport.from_samples([((0.0, 0.0), 3.0)])
    b = ResidualReport.from_samples([((1.0, 0.0), -4.0)])
    m = a.merge(b)
    assert m.max_abs == 4.0 and m.l2 == 5.0 and len(m.samples) == 2
    d = json.loads(m.to_json(include_samples=True))
    assert d["schema_version"] == 1 and d["samples"][1]["residual"] == -4.0
    assert m.to_csv().splitlines() == ["s,u,residual", "0.0,0.0,3.0", "1.0,0.0,-4.0"]


def test_report_verdicts():
    rep = ResidualReport.from_samples([((0.0, 0.0), 1e-3)])
    assert rep.verdict == "N/A"
    rep.tolerance = 1e-2
    assert rep.verdict == "PASS"
    rep.tolerance = 1e-4
    assert rep.verdict == "FAIL"
    rep.status = "disputed"
    assert rep.verdict == "DISPUTED"


# -- surfaces of revolution ------------------------------------------------------


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_revolution_residual_cylinder(r):
    st_ = ProfileState(0.0, r, 0.3, 0.0, 1.0)
    assert revolution_soliton_residual(st_, MotionGenerators(c=-1 / (2 * r * r)), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_revolution_residual_sphere_and_catenoid():
    sphere = RevolutionSurface(np.cos, np.sin, lambda s: -np.sin(s), lambda s: -np.cos(s), np.cos, lambda s: -np.sin(s))
    cat = RevolutionSurface(np.cosh, lambda s: s, np.sinh, np.cosh, lambda s: 1.0, lambda s: 0.0)
    for s in np.linspace(-1.5, 1.5, 31):
        assert abs(revolution_residual_at(sphere, s, MotionGenerators(c=-1.0))) <= 1e-12
        assert abs(revolution_residual_at(cat, s, MotionGenerators())) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_revolution_residual_is_u_independent_multiple_of_pointwise(seed):
    rng = np.random.default_rng(seed)
    surf = random_revolution(rng)
    g = MotionGenerators(a=float(rng.uniform(-1, 1)), b=float(rng.uniform(-1, 1)), c=float(rng.uniform(-1, 1)))
    s = float(rng.uniform(-1, 1))
    p, q, p1, q1, _, _ = surf.jet(s)
    speed = math.hypot(p1, q1)
    ref = revolution_residual_at(surf, s, g)
    for u in rng.uniform(0, 2 * np.pi, 4):
        r = pointwise_residual(surf.sample(s, u), g)
        np.testing.assert_allclose(-2 * speed * r, ref, rtol=1e-9, atol=1e-9)


def test_shrinking_cylinder_rate_recovers_closed_form():
    for r in (0.5, 1.0, 2.0):
        np.testing.assert_allclose(shrinking_cylinder_rate(r), -1 / (2 * r * r), atol=1e-10)


# -- cylinders ---------------------------------------------------------------------


def test_item_I_straight_line_zero_gens():
    jet = PlaneCurveJet(0.5, 1.0, 0.0, 1.0, 0.3, 0.0)
    r = cylindrical_residuals_I(jet, (1.0, 0.0, 0.0), MotionGenerators(axis="X"))
    assert r == (0.0, 0.0)


def test_item_II_straight_line_zero_gens():
    jet = PlaneCurveJet(0.5, 1.0, 0.0, 1.0, 0.3, 0.0)
    assert cylindrical_residuals_II(jet, (0.0, 0.0, 1.0), MotionGenerators(axis="X")) == (0.0, 0.0)


def test_item_II_shrinking_circle():
    s = np.linspace(0, 2 * np.pi, 50)
    jet = PlaneCurveJet(np.cos(s), -np.sin(s), -np.cos(s), np.sin(s), np.cos(s), -np.sin(s))
    r_alg, r_ode = cylindrical_residuals_II(jet, (0.0, 0.0, 1.0), MotionGenerators(c=-0.5, axis="X"))
    assert np.max(np.abs(r_ode)) <= 1e-10
    np.testing.assert_array_equal(r_alg, 0.0)


def test_sol2_residual_vanishes():
    e = sol2()
    s = np.linspace(1e-3, 5, 200)
    _, r_ode = cylindrical_residuals_I(e.jet(s), e.w, e.gens, allow_unnormalized_w=True)
    assert np.max(np.abs(r_ode)) <= 1e-12


def test_unnormalized_ruling_needs_flag():
    jet = PlaneCurveJet(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ParamViolation):
        cylindrical_residuals_I(jet, (-1.0, 1.0, 0.0), MotionGenerators(axis="X"))
    with pytest.raises(ParamViolation):
        cylindrical_residuals_II(jet, (-1.0, 1.0, 0.0), MotionGenerators(axis="X"))


def test_directrix_parallel_to_ruling_is_degenerate():
    jet = PlaneCurveJet(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(Degenerate):
        cylindrical_residuals_I(jet, (0.0, 1.0, 0.0), MotionGenerators(axis="X"))


def _wavy_cylinder(rng, item):
    w = rng.normal(size=3)
    w /= np.linalg.norm(w)
    A, k = rng.uniform(0.2, 0.8), rng.uniform(0.5, 2.0)
    q = lambda s: A * np.sin(k * s)
    dq = lambda s: A * k * np.cos(k * s)
    d2q = lambda s: -A * k * k * np.sin(k * s)
    if item == "I":
        lift = lambda x, y: np.array([0.0, x, y])
    else:
        lift = lambda x, y: np.array([x, y, 0.0])
    surf = cylinder_over(lambda s: lift(s, q(s)), w, lambda s: lift(1.0, dq(s)), lambda s: lift(0.0, d2q(s)))
    jet = lambda s: PlaneCurveJet(s, 1.0, 0.0, q(s), dq(s), d2q(s))
    return surf, jet, w


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from(["I", "II"]))
def test_item_residuals_reassemble_pointwise(seed, item):
    # 2 sqrt(|tau|^2 - <w,tau>^2) * residual(u) = r_ode -/+ 2 u r_alg
    rng = np.random.default_rng(seed)
    surf, jet, w = _wavy_cylinder(rng, item)
    g = MotionGenerators(*rng.uniform(-1, 1, 3), axis="X")
    s = float(rng.uniform(-1.5, 1.5))
    resid = cylindrical_residuals_I if item == "I" else cylindrical_residuals_II
    r_alg, r_ode = resid(jet(s), w, g)
    tau = surf.b1(s)
    scale = 2 * math.sqrt(tau @ tau - (w @ tau) ** 2)
    sign = -1.0 if item == "I" else 1.0
    for u in (-1.0, 0.0, 0.5, 2.0):
        lhs = scale * pointwise_residual(surf.sample(s, u), g)
        np.testing.assert_allclose(lhs, r_ode + sign * 2 * u * r_alg, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_forced_slopes_give_flat_cylinders(seed):
    rng = np.random.default_rng(seed)
    for make, resid in ((trivial_item_I, cylindrical_residuals_I), (trivial_item_II, cylindrical_residuals_II)):
        surf, jet, w = make(rng)
        s = float(rng.uniform(-2, 2))
        assert abs(cylindrical_mean_curvature(surf, s)) <= 1e-10
        assert abs(resid(jet(s), w, MotionGenerators(a=1.3, b=0.2, c=-0.4, axis="X"))[0]) <= 1e-10


# -- noncylindrical ruled surfaces ---------------------------------------------------


def test_helicoid_quartic_vanishes():
    for s in (-1.0, 0.0, 2.5):
        np.testing.assert_allclose(noncylindrical_quartic(helicoid(1.0), MotionGenerators(), s), 0.0, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from(["Z", "X"]))
def test_quartic_reproduces_scaled_residual(seed, axis):
    rng = np.random.default_rng(seed)
    surf = random_ruled(rng)
    g = MotionGenerators(*rng.uniform(-1, 1, 3), axis=axis)
    s = float(rng.uniform(-2, 2))
    cf = noncylindrical_quartic(surf, g, s)
    lam = ruled_invariants(surf, s).lam
    for u in (-2.0, -1.0, 0.0, 1.0, 2.0):
        r = pointwise_residual(surf.sample(s, u), g)
        np.testing.assert_allclose(np.polyval(cf, u), 2 * (lam * lam + u * u) ** 1.5 * r, atol=1e-8)


def test_varying_distribution_parameter_shows_in_linear_coefficient():
    surf = ruled_from_circle(1.0, (0.0, 0.0), (1.0, 0.5, 0.0))
    inv = ruled_invariants(surf, 0.3)
    assert inv.lam_prime != 0.0
    cf = noncylindrical_quartic(surf, MotionGenerators(), 0.3)
    np.testing.assert_allclose(cf[3], inv.lam_prime, rtol=1e-14)


def test_coefficients_vanish_for_zero_generators():
    k = noncylindrical_coefficients(random_ruled(np.random.default_rng(3)), MotionGenerators(), 0.2)
    assert (k.V, k.W, k.Y, k.Z, k.C, k.D, k.A, k.B) == (0.0,) * 8


# -- cones ------------------------------------------------------------------------------


def test_planar_cone_system_vanishes():
    flat = ConicalSurface(
        np.zeros(3),
        lambda s: np.array([np.cos(s), np.sin(s), 0.0]),
        lambda s: np.array([-np.sin(s), np.cos(s), 0.0]),
        lambda s: np.array([-np.cos(s), -np.sin(s), 0.0]),
    )
    assert conical_residual_system(flat, MotionGenerators(), 0.4) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.9])
def test_circular_cone_has_nonzero_constant_term(r):
    h = math.sqrt(1 - r * r)
    cone = ConicalSurface(
        np.zeros(3),
        lambda s: np.array([r * np.cos(s / r), r * np.sin(s / r), h]),
        lambda s: np.array([-np.sin(s / r), np.cos(s / r), 0.0]),
        lambda s: np.array([-np.cos(s / r), -np.sin(s / r), 0.0]) / r,
    )
    r1, r2, r3 = conical_residual_system(cone, MotionGenerators(), 0.0)
    assert r1 == 0.0 and r2 == 0.0
    np.testing.assert_allclose(abs(r3), h / (2 * r), rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_conical_system_reassembles_residual(seed):
    rng = np.random.default_rng(seed)
    cone = random_conical(rng)
    g = MotionGenerators(*rng.uniform(-1, 1, 3), axis=str(rng.choice(["Z", "X"])))
    s = float(rng.uniform(-1, 1))
    r1, r2, r3 = conical_residual_system(cone, g, s)
    n1 = np.linalg.norm(cone.w1(s))
    for u in (0.5, 1.0, 2.0):
        lhs = u * n1 * pointwise_residual(cone.sample(s, u), g)
        np.testing.assert_allclose(lhs, r1 * u * u + r2 * u - r3, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_great_circle_cones_are_flat(seed):
    cone = great_circle_cone(np.random.default_rng(seed))
    assert conical_residual_system(cone, MotionGenerators(), 0.1)[2] == pytest.approx(0.0, abs=1e-15)
    assert abs(conical_mean_curvature(cone, 0.1, 1.3)) <= 1e-15
