import csv
import io
import json

import pytest

from pwholo.cli import EXIT_CHECK, EXIT_INPUT, EXIT_MATH, EXIT_OK, main, parse_complex, parse_interval
from pwholo.fixtures import example_circle
from pwholo.system import PiecewiseSystem


@pytest.fixture
def circle_file(tmp_path):
    p = tmp_path / "circle.json"
    p.write_text(example_circle().dumps())
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert parse_complex("1.5-2i") == 1.5 - 2j
    assert parse_complex("i") == 1j
    assert parse_complex("-i") == -1j
    assert parse_complex("3") == 3
    assert parse_complex("0+0i") == 0


def test_parse_interval():
    assert parse_interval("-1:2.5") == (-1.0, 2.5)
    for bad in ("1:1", "2:1", "1", "a:b"):
        with pytest.raises(Exception, match="interval"):
            parse_interval(bad)


def test_fixtures_list_and_dump(capsys):
    code, out, _ = run(capsys, "fixtures")
    assert code == EXIT_OK and "example-circle" in out.split()
    code, out, _ = run(capsys, "fixtures", "--dump", "example-circle")
    assert code == EXIT_OK
    assert PiecewiseSystem.loads(out).dumps() == example_circle().dumps()
    code, _, err = run(capsys, "fixtures", "--dump", "nope")
    assert code == EXIT_INPUT and "nope" in err


def test_identity_transform_roundtrip(capsys, circle_file, tmp_path):
    out_file = tmp_path / "out.json"
    code, out, _ = run(capsys, "transform", "--system", circle_file, "--map", "identity", "--out", out_file)
    assert code == EXIT_OK and "manifold image" in out
    assert out_file.read_text() == circle_file.read_text() + "\n"
    got = PiecewiseSystem.loads(out_file.read_text())
    ref = example_circle()
    for z in (0.3 + 0.1j, 2 - 1j):
        assert abs(got.outer(z) - ref.outer(z)) < 1e-14 and abs(got.inner(z) - ref.inner(z)) < 1e-14


def test_canonical_transform_reports_line(capsys, circle_file):
    code, out, err = run(capsys, "transform", "--system", circle_file, "--map", "canonical")
    assert code == EXIT_OK
    json.loads(out)
    info = json.loads(err.split("manifold image:", 1)[1])
    assert info["kind"] == "line"


def test_degenerate_map_is_math_error(capsys, circle_file, tmp_path):
    m = tmp_path / "map.json"
    m.write_text(json.dumps({"a": [1, 0], "b": [2, 0], "c": [1, 0], "d": [2, 0]}))
    code, _, err = run(capsys, "transform", "--system", circle_file, "--map", m)
    assert code == EXIT_MATH and "invalid object" in err


def test_broken_json_is_input_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"outer": [1, 2,')
    code, _, err = run(capsys, "cycles", "--system", p)
    assert code == EXIT_INPUT and "bad.json:1:" in err


def test_missing_file_and_bad_args(capsys, circle_file):
    assert run(capsys, "cycles", "--system", "/nonexistent.json")[0] == EXIT_INPUT
    assert run(capsys, "cycles", "--system", circle_file, "--interval", "2:1")[0] == EXIT_INPUT
    assert run(capsys, "simulate", "--system", circle_file, "--z0", "zz")[0] == EXIT_INPUT
    assert run(capsys, "no-such-command")[0] == EXIT_INPUT


def test_simulate_csv_deterministic(capsys, circle_file):
    argv = ("simulate", "--system", circle_file, "--z0", "0.5+0i", "--tspan", "3")
    code, a, _ = run(capsys, *argv)
    assert code == EXIT_OK
    assert run(capsys, *argv)[1] == a
    lines = a.splitlines()
    rows = list(csv.reader(io.StringIO("\n".join(x for x in lines if not x.startswith("#")))))
    assert rows[0] == ["t", "re", "im", "region"]
    assert len(rows) > 10 and all(len(r) == 4 for r in rows)
    assert any(x.startswith("# event,") and ",crossing," in x for x in lines)
    assert lines[-1] == "# status,completed"


def test_cycles_json_deterministic(capsys):
    argv = ("cycles", "--system", "@example-line", "--interval=-0.5:0.5", "--grid", "16")
    code, a, _ = run(capsys, *argv)
    assert code == EXIT_OK
    assert run(capsys, *argv)[1] == a
    data = json.loads(a)
    assert len(data["cycles"]) == 1 and not data["continuum"]


def test_verify_paper_pass_and_override(capsys):
    code, out, err = run(capsys, "verify-paper", "--only", "algebraic")
    assert code == EXIT_OK and json.loads(out)["passed"]
    assert "criterion 2 [algebraic]" in err and "PASS" in err
    code, out, err = run(capsys, "verify-paper", "--only", "algebraic", "--expect", "algebraic.multiplier=4.9")
    assert code == EXIT_CHECK
    assert "pi'(2)" in err and "algebraic/pi'(2)" in json.loads(out)["failures"]


def test_verify_paper_bad_selection(capsys):
    code, _, err = run(capsys, "verify-paper", "--only", "nope")
    assert code == EXIT_INPUT and "unknown check group" in err
    code, _, err = run(capsys, "verify-paper", "--only", "algebraic", "--expect", "nope=1")
    assert code == EXIT_INPUT


def test_averaging_zeros(capsys, tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps({"a_plus": [0, 1], "b_plus": [0, 0], "a_minus": [0], "b_minus": [0]}))
    code, out, err = run(capsys, "averaging", "--spec", p, "--emit", "zeros")
    assert code == EXIT_OK, err
    zeros = json.loads(out)["positive_simple_zeros"]
    assert len(zeros) == 1 and abs(zeros[0] - 0.7853981633974483) < 1e-10
    code, _, err = run(capsys, "averaging", "--spec", p, "--order", "2")
    assert code == EXIT_MATH and "first order" in err


def test_classify(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"num": [[0, 0], [0, 0], [1, 0]], "den": [[1, 0], [1, 0]]}))
    code, out, err = run(capsys, "classify", "--field", p, "--at", "0")
    assert code == EXIT_OK, err
    assert json.loads(out)["n"] == 2


def test_rigidity_on_example_finds_cycle(capsys):
    code, out, _ = run(capsys, "rigidity", "--system", "@example-circle", "--trials", "20")
    assert code == EXIT_OK
    data = json.loads(out)
    assert not data["falsify"]["clean"]
