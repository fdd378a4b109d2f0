import json

import pytest

from mcf_solitons.cli import main


def run(argv, out):
    return main(argv + ["--out", str(out)])


def read_json(path):
    return json.loads(path.read_text())


def test_figure_outputs(tmp_path):
    assert run(["figure", "1"], tmp_path) == 0
    for ext in ("csv", "svg", "json"):
        assert (tmp_path / f"fig1.{ext}").is_file()
    md = read_json(tmp_path / "fig1.json")
    assert md["classification"] == "translating"
    assert md["max_residual"] <= 1e-6
    header = (tmp_path / "fig1.csv").read_text().splitlines()[0]
    assert header.startswith("s,phi,psi")
    assert (tmp_path / "fig1.svg").read_text().startswith("<svg")


def test_figure_literal_records_mode(tmp_path):
    assert run(["figure", "4", "--literal"], tmp_path) == 0
    md = read_json(tmp_path / "fig4.json")
    assert md["mode"] == "literal" and md["tangent_normalized"] is False


def test_format_selection(tmp_path):
    assert run(["figure", "2", "--format", "json"], tmp_path) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig2.json"]


@pytest.mark.parametrize("argv", [["figure", "11"], ["verify", "nosuch"], ["flow", "torus"], [], ["figure"], ["residual"]])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert run(argv, tmp_path) == 2


def test_verify_all(tmp_path, capsys):
    assert run(["verify", "all"], tmp_path) == 0
    out = capsys.readouterr().out
    assert "DISPUTED" in out
    rep = read_json(tmp_path / "verify.json")
    assert rep["schema_version"] == 1
    verdicts = {r["name"]: r["verdict"] for r in rep["entries"]}
    assert verdicts["sol1-a"] == verdicts["sol1-b"] == "DISPUTED"
    assert all(v == "PASS" for k, v in verdicts.items() if not k.startswith("sol1"))


def test_verify_grim_reaper(tmp_path):
    assert run(["verify", "grim-reaper"], tmp_path) == 0
    rep = read_json(tmp_path / "verify_grim-reaper.json")
    assert rep["entries"][0]["max_abs"] <= 1e-9


def test_residual_spec_file(tmp_path):
    spec = tmp_path / "cyl.spec"
    spec.write_text("name = cyl\nfamily = revolution\nphi = 2\npsi = s\ngens = c=-1/8\ngrid = s=-1:1:5, u=0:6:4\n")
    assert run(["residual", str(spec)], tmp_path) == 0
    rep = read_json(tmp_path / "residual.json")
    assert rep["results"][0]["max_abs"] <= 1e-12
    assert (tmp_path / "residual_cyl.csv").is_file()
    assert run(["residual", str(spec), "--gens", "c=-1"], tmp_path) == 1


def test_residual_random_quartic(tmp_path):
    assert run(["residual", "--random-ruled", "5", "--quartic", "--seed", "7"], tmp_path) == 0
    rep = read_json(tmp_path / "residual.json")
    assert len(rep["results"]) == 5 and rep["seed"] == 7


def test_flow_cylinder(tmp_path, capsys):
    assert run(["flow", "cylinder", "--dt", "1e-4", "--t", "0.3", "--snapshots", "3"], tmp_path) == 0
    rep = read_json(tmp_path / "flow_cylinder.json")
    assert rep["sigma_monotone"] == "decreasing"
    for row in rep["series"]:
        assert abs(row["sigma"] - row["expected"]) <= 5e-3
    assert (tmp_path / "flow_cylinder_snapshots.csv").read_text().startswith("t,index,y,z")


def test_flow_plane_is_stationary(tmp_path):
    assert run(["flow", "plane"], tmp_path) == 0
    rep = read_json(tmp_path / "flow_plane.json")
    assert all(r["sigma"] == pytest.approx(1.0, abs=1e-12) for r in rep["series"])


def test_flow_grim_reaper(tmp_path):
    assert run(["flow", "grim-reaper", "--snapshots", "2"], tmp_path) == 0
    rep = read_json(tmp_path / "flow_grim-reaper.json")
    last = rep["series"][-1]
    assert abs(last["zeta"] - last["expected"]) <= 1e-4


def test_adjudicate(tmp_path):
    assert run(["adjudicate-sol1"], tmp_path) == 0
    rep = read_json(tmp_path / "sol1_adjudication.json")
    assert {"variant_a_error", "variant_b_error", "verdict", "numeric_reference"} <= set(rep)


def test_outputs_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["figure", "3"], d) == 0
        assert run(["flow", "plane", "--snapshots", "2"], d) == 0
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes(), f.name
