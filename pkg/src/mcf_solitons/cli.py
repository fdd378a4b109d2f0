"""Command-line entry point: ``mcf-solitons <command> ...``.

Exit codes: 0 success (or informational), 1 verification failure, 2 usage
error.  Output files are deterministic for fixed flags and seed.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import adjudicate_sol1, entry_names, flow_profile, get_entry, verify, verify_all
from .curves import SampledCurve
from .errors import SolitonError, SpecParseError, UnknownEntry, UnknownFigure
from .flow import FlowConfig, self_similarity_report
from .output import rows_to_csv, snapshots_csv, svg_plot, to_json, write_text
from .profile import IntegrationConfig, run_preset
from .random_surfaces import random_ruled
from .geometry import ruled_invariants
from .residual import SCHEMA_VERSION, MotionGenerators, noncylindrical_quartic, pointwise_residual, residual_grid
from .specfile import load_spec, parse_gens, parse_grid

FORMATS = ("csv", "svg", "json")
FIGURE_TOL = 1e-6
GENERATOR = f"mcf_solitons {__version__}"


class UsageError(Exception):
    pass


def _formats(text):
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {FORMATS}")
    return tuple(fmts)


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    p.add_argument("--format", type=_formats, default=FORMATS, help="comma list of csv,svg,json")
    p.add_argument("--rtol", type=_positive, default=None, help="integrator relative tolerance")
    p.add_argument("--atol", type=_positive, default=None, help="absolute tolerance override")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="mcf-solitons", description="Self-similar MCF solitons: figures, residuals, catalog checks and flow tests.")
    ap.add_argument("--version", action="version", version=GENERATOR)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", parents=[common], help="integrate a figure preset (1..10)")
    p.add_argument("n", type=int)
    p.add_argument("--literal", action="store_true", help="integrate the printed initial tangent without normalizing")

    p = sub.add_parser("verify", parents=[common], help="verify catalog entries")
    p.add_argument("target", help="'all' or an entry name: " + ", ".join(entry_names()))

    p = sub.add_parser("residual", parents=[common], help="soliton residual of a surface spec file")
    p.add_argument("spec", nargs="?", type=Path, help="surface spec file")
    p.add_argument("--gens", help="override motion generators, e.g. 'a=0,b=1,c=0,axis=X'")
    p.add_argument("--grid", help="override grid, e.g. 's=-1:1:21,u=-1:1:11'")
    p.add_argument("--random-ruled", type=int, metavar="N", default=0, help="use N seeded random noncylindrical surfaces")
    p.add_argument("--quartic", action="store_true", help="cross-check the quartic coefficients against pointwise residuals")

    p = sub.add_parser("flow", parents=[common], help="evolve an entry's profile and fit homotheties")
    p.add_argument("entry", help="cylinder, plane, grim-reaper, catenoid or figure-N")
    p.add_argument("--dt", type=_positive, default=1e-4)
    p.add_argument("--t", type=_positive, default=None, help="final time")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--snapshots", type=int, default=10)
    p.add_argument("--tol", type=_positive, default=None, help="fit residual tolerance")

    sub.add_parser("adjudicate-sol1", parents=[common], help="check both printed sol1 variants")
    sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    return ap


def _emit(args, stem, csv_text=None, svg_text=None, json_obj=None):
    written = []
    if csv_text is not None and "csv" in args.format:
        written.append(write_text(args.out / f"{stem}.csv", csv_text))
    if svg_text is not None and "svg" in args.format:
        written.append(write_text(args.out / f"{stem}.svg", svg_text))
    if json_obj is not None and "json" in args.format:
        written.append(write_text(args.out / f"{stem}.json", to_json(json_obj)))
    return written


# ---------------------------------------------------------------------------
# commands


def cmd_figure(args) -> int:
    cfg = IntegrationConfig()
    if args.rtol:
        cfg = replace(cfg, rtol=args.rtol)
    if args.atol:
        cfg = replace(cfg, atol=args.atol)
    curve = run_preset(args.n, literal=args.literal, cfg=cfg)
    md = curve.metadata
    svg = svg_plot(
        [(f"figure {args.n}", curve.points[:, 1], curve.points[:, 0])],
        title=f"Figure {args.n}: b={md['b']:g}, c={md['c']:g} ({md['classification']})",
        xlabel="psi",
        ylabel="phi",
        generator=GENERATOR,
    )
    report = {"schema_version": SCHEMA_VERSION, "command": "figure", "tolerance": FIGURE_TOL, **md}
    if args.literal:
        report["note"] = "printed initial tangent integrated without normalization; s is not arc length"
    _emit(args, f"fig{args.n}", curve.to_csv(), svg, report)
    ok = md["max_residual"] <= FIGURE_TOL
    print(
        f"figure {args.n}: {md['classification']}; stop forward={md['stop_forward']} backward={md['stop_backward']}; "
        f"s in [{md['s_range'][0]:.3f}, {md['s_range'][1]:.3f}]; max residual {md['max_residual']:.3e}; "
        f"speed drift {md['max_speed_drift']:.3e}"
    )
    return 0 if ok else 1


def cmd_verify(args) -> int:
    if args.target == "all":
        reports = verify_all()
    else:
        reports = [verify(get_entry(args.target))]
    rows = []
    failed = False
    for rep in reports:
        if args.atol is not None and rep.status != "disputed":
            rep.tolerance = args.atol
        verdict = rep.verdict
        failed |= verdict == "FAIL"
        extra = " (informational)" if verdict == "DISPUTED" else ""
        print(f"{rep.name:18s} {verdict:9s} max_abs={rep.max_abs:.3e} tol={rep.tolerance:.0e}{extra}")
        rows.append(rep.to_dict())
    stem = "verify" if args.target == "all" else f"verify_{args.target}"
    csv_text = rows_to_csv(("name", "verdict", "max_abs", "l2", "tolerance"), [(r["name"], r["verdict"], r["max_abs"], r["l2"], r["tolerance"]) for r in rows])
    _emit(args, stem, csv_text, None, {"schema_version": SCHEMA_VERSION, "command": "verify", "target": args.target, "entries": rows})
    return 1 if failed else 0


def _quartic_check(surface, gens, s_vals, u_vals):
    worst = 0.0
    for s in s_vals:
        coef = noncylindrical_quartic(surface, gens, s)
        lam = ruled_invariants(surface, s).lam
        for u in u_vals:
            r = pointwise_residual(surface.sample(s, u), gens)
            worst = max(worst, abs(np.polyval(coef, u) - 2 * (lam * lam + u * u) ** 1.5 * r))
    return worst


def cmd_residual(args) -> int:
    if bool(args.spec) == bool(args.random_ruled):
        raise UsageError("give either a spec file or --random-ruled N")
    tol = args.atol if args.atol is not None else (1e-8 if args.quartic else 1e-12)
    if args.random_ruled:
        rng = np.random.default_rng(args.seed)
        items = []
        for i in range(args.random_ruled):
            surf = random_ruled(rng)
            a, b, c = rng.uniform(-1, 1, 3)
            gens = MotionGenerators(a=a, b=b, c=c, axis="Z")
            s = float(rng.uniform(-2, 2))
            items.append((f"random-{i}", surf, gens, {"s_range": [s, s], "u_range": [-2.0, 2.0], "counts": [1, 5]}))
        if not args.quartic:
            raise UsageError("--random-ruled is a quartic cross-check; add --quartic")
    else:
        spec = load_spec(args.spec)
        gens = parse_gens(args.gens) if args.gens else spec.gens
        grid = parse_grid(args.grid) if args.grid else spec.grid
        items = [(spec.name, spec.surface, gens, grid)]
        if args.quartic and spec.family != "ruled":
            raise UsageError("--quartic needs a noncylindrical ruled surface")

    out = []
    failed = False
    for name, surf, gens, grid in items:
        if args.quartic:
            ss = np.linspace(*grid["s_range"], grid["counts"][0])
            uu = np.linspace(*grid["u_range"], grid["counts"][1])
            val = _quartic_check(surf, gens, ss, uu)
            entry = {"name": name, "mode": "quartic", "max_identity_error": val, "tolerance": tol, "grid": grid}
            ok = val <= tol
            print(f"{name}: quartic identity max error {val:.3e} ({'PASS' if ok else 'FAIL'})")
        else:
            rep = residual_grid(surf, gens, grid["s_range"], grid["u_range"], grid["counts"])
            rep.name, rep.tolerance = name, tol
            entry = rep.to_dict()
            ok = rep.verdict == "PASS"
            print(f"{name}: max_abs={rep.max_abs:.3e} l2={rep.l2:.3e} ({rep.verdict})")
            _emit(args, f"residual_{name}", rep.to_csv(), None, None)
        entry["gens"] = {"a": gens.a, "b": gens.b, "c": gens.c, "axis": gens.axis}
        failed |= not ok
        out.append(entry)
    _emit(args, "residual", None, None, {"schema_version": SCHEMA_VERSION, "command": "residual", "seed": args.seed, "results": out})
    return 1 if failed else 0


FLOW_DEFAULTS = {
    # entry: (final time, samples, tolerance)
    "cylinder": (0.3, 200, 5e-3),
    "plane": (0.1, 100, 5e-3),
    "grim-reaper": (0.1, 120, 5e-3),
    "grim-reaper-unit": (0.1, 120, 5e-3),
    "catenoid": (0.1, 120, 5e-3),
    "figure": (0.05, 120, 1e-2),
}


def _flow_setup(entry, n):
    if entry.startswith("figure-"):
        try:
            num = int(entry.split("-", 1)[1])
        except ValueError:
            raise UnknownEntry(f"bad figure entry {entry!r}") from None
        curve = run_preset(num)
        m = (curve.s >= -1.5) & (curve.s <= 1.5)
        c = curve.metadata["c"]
        return SampledCurve.from_points(curve.points[m]), "revolution", "Z", (0.0, 1.0), f"sigma^2 = 1 + 2ct (c = {c:g})", c
    fp = flow_profile(entry, n)
    return fp.curve, fp.family, fp.axis, fp.direction, fp.expected, None


def _expected(entry, t, c=None):
    if c is not None:
        return math.sqrt(max(1 + 2 * c * t, 0.0))
    if entry == "cylinder":
        return math.sqrt(max(1 - t, 0.0))
    if entry in ("plane", "catenoid"):
        return 1.0
    if entry.startswith("grim-reaper"):
        return -t / math.sqrt(5)
    return float("nan")


def cmd_flow(args) -> int:
    key = "figure" if args.entry.startswith("figure-") else args.entry
    if key not in FLOW_DEFAULTS:
        raise UnknownEntry(f"no flow check for {args.entry!r}; choose from {', '.join(FLOW_DEFAULTS)}")
    t_end, n, tol = FLOW_DEFAULTS[key]
    t_end = args.t or t_end
    n = args.samples or n
    tol = args.tol or tol
    curve, family, axis, direction, expected, c = _flow_setup(args.entry, n)
    steps = max(1, int(round(t_end / args.dt)))
    every = max(1, steps // max(1, args.snapshots))
    cfg = FlowConfig(dt=args.dt, n_steps=steps, n_samples=n, snapshot_every=every)
    rep = self_similarity_report(curve, family, cfg, axis=axis, tol=tol, direction=direction, name=args.entry)
    rep["schema_version"] = SCHEMA_VERSION
    rep["expected"] = expected
    col = "zeta" if args.entry.startswith("grim-reaper") else "sigma"
    print(f"flow {args.entry}: {family}, dt={args.dt:g}, samples={n}, expected {expected}")
    print(f"{'t':>8s} {'sigma':>12s} {'xi':>10s} {'zeta':>12s} {'fit_res':>10s} {'expected ' + col:>16s}")
    for r in rep["series"]:
        r["expected"] = _expected(args.entry, r["t"], c)
        print(f"{r['t']:8.4f} {r['sigma']:12.8f} {r['xi']:10.2e} {r['zeta']:12.8f} {r['fit_residual']:10.2e} {r['expected']:16.8f}")
    sig = [r["sigma"] for r in rep["series"]]
    rep["sigma_monotone"] = "decreasing" if all(b < a for a, b in zip(sig, sig[1:])) else (
        "increasing" if all(b > a for a, b in zip(sig, sig[1:])) else "none"
    )
    print(f"status {rep['status']}; sigma {rep['sigma_monotone']}; verdict {rep['verdict']} (tol {tol:g})")
    run = rep["_run"]
    names = ("phi", "psi") if family == "revolution" else ("y", "z")
    series = [(f"t={t:.4f}", s.points[:, 0], s.points[:, 1]) for t, s in zip(run.times, run.snapshots)]
    svg = svg_plot(series, title=f"flow {args.entry}", xlabel=names[0], ylabel=names[1], generator=GENERATOR)
    table = rows_to_csv(("t", "sigma", "xi", "zeta", "fit_residual", "expected"), [(r["t"], r["sigma"], r["xi"], r["zeta"], r["fit_residual"], r["expected"]) for r in rep["series"]])
    _emit(args, f"flow_{args.entry}", table, svg, rep)
    _emit(args, f"flow_{args.entry}_snapshots", snapshots_csv(run.times, run.snapshots, names))
    return 0 if rep["verdict"] == "PASS" else 1


def cmd_adjudicate(args) -> int:
    rep = adjudicate_sol1()
    for k, v in rep["variants"].items():
        print(f"variant {k} (exp {v['exponent']:g} s): sup deviation {v['sup_deviation']:.3e}, ODE residual {v['ode_residual_sup']:.3e}")
    print(f"numeric reference self-residual {rep['numeric_reference']['self_residual']:.3e}")
    print(f"verdict: {rep['verdict']}")
    rows = [(k, v["exponent"], v["sup_deviation"], v["ode_residual_sup"]) for k, v in rep["variants"].items()]
    _emit(args, "sol1_adjudication", rows_to_csv(("variant", "exponent", "sup_deviation", "ode_residual_sup"), rows), None, rep)
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all()
    rows = []
    for r in results:
        print(r.line())
        rows.append((r.number, r.title, "PASS" if r.passed else "FAIL"))
    _emit(args, "selftest", rows_to_csv(("criterion", "title", "result"), rows), None, {"schema_version": SCHEMA_VERSION, "criteria": [r.to_dict() for r in results]})
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "figure": cmd_figure,
    "verify": cmd_verify,
    "residual": cmd_residual,
    "flow": cmd_flow,
    "adjudicate-sol1": cmd_adjudicate,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return COMMANDS[args.command](args)
    except (UsageError, UnknownFigure, UnknownEntry, SpecParseError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except SolitonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
