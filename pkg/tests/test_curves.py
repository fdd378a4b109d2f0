import numpy as np
import pytest

from mcf_solitons.curves import SampledCurve, circumcircle_curvature, discrete_tangent, resample_arclength


def circle(n, r=1.0, closed=True):
    th = np.linspace(0, 2 * np.pi, n, endpoint=not closed)
    return SampledCurve.from_points(r * np.column_stack([np.cos(th), np.sin(th)]), closed=closed)


def test_resample_circle_preserves_length():
    c = resample_arclength(circle(100), 50)
    assert len(c) == 50
    np.testing.assert_allclose(c.length(), 2 * np.pi, atol=1e-6)
    np.testing.assert_allclose(np.hypot(*c.points.T), 1.0, atol=1e-6)
    gaps = np.linalg.norm(np.diff(np.vstack([c.points, c.points[:1]]), axis=0), axis=1)
    np.testing.assert_allclose(gaps, gaps.mean(), rtol=1e-6)


def test_resample_open_keeps_endpoints():
    y = np.linspace(-1, 1, 40) ** 3
    curve = SampledCurve.from_points(np.column_stack([y, y**2]))
    out = resample_arclength(curve, 25)
    np.testing.assert_array_equal(out.points[[0, -1]], curve.points[[0, -1]])
    assert np.all(np.diff(out.s) > 0)


def test_resample_line_is_exact():
    x = np.linspace(0, 3, 7)
    out = resample_arclength(SampledCurve.from_points(np.column_stack([x, 2 * x])), 13)
    np.testing.assert_allclose(out.points[:, 0], np.linspace(0, 3, 13), atol=1e-13)
    np.testing.assert_allclose(out.points[:, 1], 2 * out.points[:, 0], atol=1e-13)


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_counterclockwise_circle_curvature(r):
    k = circumcircle_curvature(circle(64, r).points, closed=True)
    np.testing.assert_allclose(k, -1 / r, rtol=1e-12)


def test_open_ends_are_extrapolated():
    x = np.linspace(0, 1, 11)
    k = circumcircle_curvature(np.column_stack([x, x**2]))
    assert len(k) == 11 and np.all(np.isfinite(k))


def test_tangents_unit():
    t = discrete_tangent(circle(30, 2.0, closed=False).points)
    np.testing.assert_allclose(np.linalg.norm(t, axis=1), 1.0, atol=1e-15)


def test_validation():
    with pytest.raises(ValueError):
        SampledCurve(np.array([0.0, 0.0]), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        SampledCurve(np.array([0.0, 1.0]), np.zeros((3, 2)), np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        resample_arclength(circle(10), 2)


def test_csv_columns():
    c = circle(5)
    c.columns["residual"] = np.zeros(5)
    lines = c.to_csv().splitlines()
    assert lines[0] == "s,phi,psi,dphi,dpsi,kappa,residual"
    assert len(lines) == 6
