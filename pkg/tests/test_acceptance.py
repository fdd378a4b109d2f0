"""Acceptance criteria, one test per criterion at its stated tolerance.

Every result line is printed and also collected for the terminal summary.
"""

import contextlib
import io

import pytest

from mcf_solitons.acceptance import CHECKS, CriterionResult
from mcf_solitons.cli import main

LINES = []


def report(res: CriterionResult):
    line = res.line()
    LINES.append(line)
    print(line)
    return res


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__ for c in CHECKS])
def test_criterion(check):
    res = report(check())
    assert res.passed, res.line()


def test_criterion_11_selftest_is_byte_reproducible(tmp_path):
    dirs = [tmp_path / "run1", tmp_path / "run2"]
    codes = []
    for d in dirs:
        with contextlib.redirect_stdout(io.StringIO()):
            codes.append(main(["selftest", "--out", str(d)]))
    names = sorted(p.name for p in dirs[0].iterdir() if p.suffix in (".csv", ".json"))
    same = bool(names) and all((dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names)
    res = report(CriterionResult(11, "reproducible selftest outputs", same and codes == [0, 0], {"files": names, "exit codes": codes}))
    assert res.passed, res.line()
