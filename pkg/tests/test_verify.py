import json
import math

import pytest

from pwholo import verify
from pwholo.verify import EXPECTED, GROUPS, Check, GroupResult, Recorder, Report, parse_override, run_group


def test_parse_override():
    assert parse_override("algebraic.multiplier=4.9") == ("algebraic.multiplier", 4.9)
    assert parse_override("algebraic.image-center = 0-1.5j") == ("algebraic.image-center", -1.5j)
    assert parse_override("averaging.m1-zeros=0.1,0.2") == ("averaging.m1-zeros", (0.1, 0.2))
    with pytest.raises(KeyError):
        parse_override("nope=1")


def test_recorder_semantics():
    rec = Recorder("g")
    assert rec.close("a", 1.0, 1.05, 0.1)
    assert not rec.close("b", None, 1.0, 0.1)
    assert rec.below("c", 1e-9, 1e-8) and not rec.below("d", 1.0, 1e-8)
    assert rec.at_least("e", 8, 8)
    assert rec.equal("f", 3, 3)
    rec.fail("g", ValueError("boom"))
    assert [c.passed for c in rec.checks] == [True, False, True, False, True, True, False]
    assert rec.checks[-1].detail == "ValueError: boom"
    assert rec.checks[0].label == "g/a"


def test_group_line_names_failures():
    checks = [Check("g", "ok", 1, 1, None, True), Check("g", "bad one", 2, 1, None, False)]
    line = GroupResult(3, "g", "title", checks, 0.25).line()
    assert line.startswith("criterion 3 [g] title: FAIL (2 checks,")
    assert line.endswith("failing: bad one")
    assert "PASS" in GroupResult(3, "g", "title", checks[:1]).line()
    assert not GroupResult(3, "g", "title", []).passed


def test_run_group_catches_crash(monkeypatch):
    def boom(rec, exp, seed=0):
        rec.equal("first", 1, 1)
        raise RuntimeError("kaput")

    monkeypatch.setattr(verify, "CRITERIA", [(9, "crash", "crashing group", boom)])
    res = run_group("crash")
    assert not res.passed and [c.name for c in res.checks] == ["first", "unexpected error"]
    assert "kaput" in res.checks[-1].detail
    with pytest.raises(KeyError):
        run_group("missing")


def test_report_json_roundtrip():
    g = GroupResult(1, "g", "t", [Check("g", "x", 1 + 2j, {1: 0.5}, (1e-3,), False, "d")], 0.1)
    rep = Report([g])
    data = json.loads(json.dumps(rep.to_json()))
    assert data["passed"] is False and data["failures"] == ["g/x"]
    c = data["groups"][0]["checks"][0]
    assert c["measured"] == [1.0, 2.0] and c["expected"] == {"1": 0.5} and c["tol"] == [1e-3]


def test_expected_table_complete():
    assert len(GROUPS) == 8 and len(set(GROUPS)) == 8
    assert abs(EXPECTED["example.multiplier"] - math.exp(-math.pi)) < 1e-15
    assert EXPECTED["algebraic.multiplier"] == 5.0


def test_override_changes_outcome():
    assert run_group("algebraic").passed
    res = run_group("algebraic", {"algebraic.fixed-point": 2.5})
    assert not res.passed and "fixed point u*" in res.line()


def test_order_factor_helpers():
    tol, _ = verify.tolerance_order_factors()
    fixed, _ = verify.fixed_step_order_factors()
    # adaptive error tracks the tolerance, fixed steps show the fifth order
    assert 1.3 < min(tol) and max(tol) < 3
    assert min(fixed) > 16
