"""Declarative surface spec files.

One ``key = value`` per line, ``#`` starts a comment::

    name   = helicoid
    family = ruled            # ruled | cylindrical | conical | revolution
    beta   = (0, 0, s)
    w      = (cos(s), sin(s), 0)
    gens   = a=0, b=0, c=0, axis=Z
    grid   = s=-2:2:50, u=-2:2:10

Revolution surfaces give ``phi`` and ``psi`` or ``table = profile.csv`` with
columns ``s, phi, psi`` (cubic-spline interpolated).  Conical surfaces give
``apex`` and ``w``.  Expressions are in the variable ``s``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import SpecParseError
from .expr import Expr
from .geometry import ConicalSurface, RevolutionSurface, RuledSurface
from .residual import MotionGenerators

FAMILIES = ("ruled", "cylindrical", "conical", "revolution")


@dataclass(frozen=True)
class SurfaceSpec:
    name: str
    family: str
    surface: object
    gens: MotionGenerators
    grid: dict
    fields: dict


def split_top(text: str):
    """Split on commas not nested inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise SpecParseError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise SpecParseError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur).strip())
    return parts


def _strip_parens(text: str) -> str:
    t = text.strip()
    if t.startswith("(") and t.endswith(")") and len(split_top(t[1:-1])) > 1:
        return t[1:-1]
    return t


def parse_vector(text: str):
    """Three expressions; returns value, first and second derivative callables."""
    comps = [Expr.parse(c) for c in split_top(_strip_parens(text))]
    if len(comps) != 3:
        raise SpecParseError(f"expected 3 components, got {len(comps)} in {text!r}")
    d1 = [c.diff() for c in comps]
    d2 = [c.diff() for c in d1]

    def vec(fs):
        return lambda s: np.array([float(f(s)) for f in fs])

    return vec(comps), vec(d1), vec(d2)


def parse_scalar(text: str):
    f = Expr.parse(text)
    d1 = f.diff()
    d2 = d1.diff()
    return (lambda s: float(f(s))), (lambda s: float(d1(s))), (lambda s: float(d2(s)))


def parse_gens(text: str) -> MotionGenerators:
    kw = {}
    for part in split_top(text):
        if not part:
            continue
        if "=" not in part:
            raise SpecParseError(f"generator item {part!r} is not key=value")
        k, v = (x.strip() for x in part.split("=", 1))
        if k == "axis":
            kw["axis"] = v.upper()
        elif k in ("a", "b", "c"):
            kw[k] = float(Expr.parse(v)(0.0))
        else:
            raise SpecParseError(f"unknown generator key {k!r}")
    try:
        return MotionGenerators(**kw)
    except ValueError as exc:
        raise SpecParseError(str(exc)) from None


def parse_grid(text: str) -> dict:
    """``s=lo:hi:n, u=lo:hi:n``."""
    out = {}
    for part in split_top(text):
        k, _, v = part.partition("=")
        bits = v.split(":")
        if k.strip() not in ("s", "u") or len(bits) != 3:
            raise SpecParseError(f"bad grid item {part!r}")
        lo, hi = (float(Expr.parse(b)(0.0)) for b in bits[:2])
        out[k.strip()] = (lo, hi, int(bits[2]))
    if set(out) != {"s", "u"}:
        raise SpecParseError("grid needs both s and u ranges")
    return {
        "s_range": [out["s"][0], out["s"][1]],
        "u_range": [out["u"][0], out["u"][1]],
        "counts": [out["s"][2], out["u"][2]],
    }


def read_fields(text: str) -> dict:
    fields = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise SpecParseError(f"line {n}: expected key = value")
        key = key.strip().lower()
        if key in fields:
            raise SpecParseError(f"line {n}: duplicate key {key!r}")
        fields[key] = val.strip()
    return fields


def _table_profile(path: Path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise SpecParseError(f"cannot read table {path}: {exc}") from None
    try:
        s = np.array([float(r["s"]) for r in rows])
        phi = np.array([float(r["phi"]) for r in rows])
        psi = np.array([float(r["psi"]) for r in rows])
    except (KeyError, ValueError) as exc:
        raise SpecParseError(f"{path}: table needs numeric s, phi, psi columns ({exc})") from None
    if len(s) < 4:
        raise SpecParseError(f"{path}: table needs at least 4 rows")
    sp, sq = CubicSpline(s, phi), CubicSpline(s, psi)
    f = lambda c, k: (lambda x: float(c(x, k)))
    return f(sp, 0), f(sq, 0), f(sp, 1), f(sp, 2), f(sq, 1), f(sq, 2)


def build_spec(fields: dict, base: Path = Path(".")) -> SurfaceSpec:
    family = fields.get("family", "").lower()
    if family not in FAMILIES:
        raise SpecParseError(f"family must be one of {FAMILIES}, got {family!r}")
    name = fields.get("name", family)
    gens = parse_gens(fields.get("gens", ""))
    grid = parse_grid(fields.get("grid", "s=-1:1:21, u=-1:1:11"))

    def need(key):
        if key not in fields:
            raise SpecParseError(f"{family} surface needs {key!r}")
        return fields[key]

    if family in ("ruled", "cylindrical"):
        b, db, d2b = parse_vector(need("beta"))
        w, dw, d2w = parse_vector(need("w"))
        mode = "noncylindrical" if family == "ruled" else "cylindrical"
        surf = RuledSurface(b, w, db, d2b, dw, d2w, mode=mode, name=name)
    elif family == "conical":
        apex = np.array([float(Expr.parse(c)(0.0)) for c in split_top(_strip_parens(need("apex")))])
        if apex.shape != (3,):
            raise SpecParseError("apex needs 3 components")
        w, dw, d2w = parse_vector(need("w"))
        surf = ConicalSurface(apex, w, dw, d2w)
    else:
        if "table" in fields:
            p, q, p1, p2, q1, q2 = _table_profile(base / fields["table"])
        else:
            p, p1, p2 = parse_scalar(need("phi"))
            q, q1, q2 = parse_scalar(need("psi"))
        surf = RevolutionSurface(p, q, p1, p2, q1, q2, name=name)
    return SurfaceSpec(name, family, surf, gens, grid, fields)


def load_spec(path) -> SurfaceSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from None
    return build_spec(read_fields(text), path.parent)
