import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcf_solitons.errors import SpecParseError
from mcf_solitons.expr import Expr
from mcf_solitons.residual import residual_grid
from mcf_solitons.specfile import build_spec, load_spec, parse_gens, parse_grid, read_fields, split_top


@pytest.mark.parametrize(
    "text, value",
    [
        ("-2^2", -4.0),
        ("2^3^2", 512.0),
        ("2**3", 8.0),
        ("1 - 2 - 3", -4.0),
        ("8 / 4 / 2", 1.0),
        ("pi", math.pi),
        ("e", math.e),
        ("sqrt(2)*sqrt(2)", 2.0),
        ("-1/2", -0.5),
    ],
)
def test_constant_expressions(text, value):
    np.testing.assert_allclose(Expr.parse(text)(0.0), value, rtol=1e-15)


FUNCS = ["sin(s)", "cos(2*s)", "tan(s/3)", "sinh(s)", "cosh(s)^2", "tanh(s)", "exp(-s^2)", "log(2 + s)", "sqrt(3 + s)", "atan(s)", "s^3 - 2*s", "1/(1 + s^2)"]


@pytest.mark.parametrize("text", FUNCS)
@given(st.floats(-1.0, 1.0))
def test_derivative_matches_finite_difference(text, x):
    f = Expr.parse(text)
    h = 1e-5
    np.testing.assert_allclose(f.diff()(x), (f(x + h) - f(x - h)) / (2 * h), rtol=1e-6, atol=1e-7)


def test_vectorized_evaluation():
    s = np.linspace(0, 1, 5)
    np.testing.assert_allclose(Expr.parse("s*sin(s)")(s), s * np.sin(s))


@pytest.mark.parametrize("bad", ["", "1 +", "sin(", "foo(s)", "s $ 2", "(1, 2)", "x"])
def test_parse_errors(bad):
    with pytest.raises(SpecParseError):
        Expr.parse(bad)(0.0)


def test_split_top_and_grid():
    assert split_top("(a, b), c, f(d, e)") == ["(a, b)", "c", "f(d, e)"]
    g = parse_grid("s=-1:1:21, u=0:2*pi:11")
    assert g["counts"] == [21, 11]
    np.testing.assert_allclose(g["u_range"], [0.0, 2 * math.pi])
    with pytest.raises(SpecParseError):
        parse_grid("s=0:1:3")


def test_gens():
    g = parse_gens("a=0, b=1, c=-1/2, axis=x")
    assert (g.a, g.b, g.c, g.axis) == (0.0, 1.0, -0.5, "X")
    with pytest.raises(SpecParseError):
        parse_gens("d=1")
    with pytest.raises(SpecParseError):
        parse_gens("axis=Y")


def test_fields():
    f = read_fields("name = x  # comment\n\n family=ruled\n")
    assert f == {"name": "x", "family": "ruled"}
    with pytest.raises(SpecParseError):
        read_fields("a=1\na=2")
    with pytest.raises(SpecParseError):
        read_fields("no equals sign")


def test_helicoid_spec_file(tmp_path):
    path = tmp_path / "helicoid.spec"
    path.write_text("name = helicoid\nfamily = ruled\nbeta = (0, 0, s)\nw = (cos(s), sin(s), 0)\ngrid = s=-2:2:11, u=-2:2:5\n")
    spec = load_spec(path)
    rep = residual_grid(spec.surface, spec.gens, spec.grid["s_range"], spec.grid["u_range"], spec.grid["counts"])
    assert rep.max_abs <= 1e-12


def test_revolution_table_spec(tmp_path):
    s = np.linspace(-1, 1, 81)
    rows = "\n".join(f"{a!r},{b!r},{c!r}" for a, b, c in zip(s.tolist(), np.cosh(s).tolist(), s.tolist()))
    (tmp_path / "cat.csv").write_text("s,phi,psi\n" + rows + "\n")
    (tmp_path / "cat.spec").write_text("family = revolution\ntable = cat.csv\ngrid = s=-0.8:0.8:9, u=0:1:2\n")
    spec = load_spec(tmp_path / "cat.spec")
    rep = residual_grid(spec.surface, spec.gens, spec.grid["s_range"], spec.grid["u_range"], spec.grid["counts"])
    assert rep.max_abs <= 1e-4


def test_spec_errors(tmp_path):
    with pytest.raises(SpecParseError):
        build_spec({"family": "torus"})
    with pytest.raises(SpecParseError):
        build_spec({"family": "ruled", "beta": "(0, 0, s)"})
    with pytest.raises(SpecParseError):
        build_spec({"family": "ruled", "beta": "(0, s)", "w": "(1, 0, 0)"})
    with pytest.raises(SpecParseError):
        load_spec(tmp_path / "missing.spec")
    (tmp_path / "t.spec").write_text("family = revolution\ntable = nope.csv\n")
    with pytest.raises(SpecParseError):
        load_spec(tmp_path / "t.spec")
