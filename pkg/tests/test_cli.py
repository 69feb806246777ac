import csv
import io
import json
import math

import numpy as np
import pytest

from rankare import cli, reference


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


def table_cells(text):
    r = rows(text)
    return {float(row[0]): [float(c) if c else None for c in row[1:]] for row in r[1:]}


def test_header_lines(capsys):
    code, out = run(capsys, "bounds")
    assert code == 0
    head = out.splitlines()[:3]
    assert head[0].startswith("# rankare ")
    assert head[1] == "# command: bounds"
    assert json.loads(head[2].removeprefix("# config: "))["command"] == "bounds"


def test_table2_row(capsys):
    code, out = run(capsys, "table", "2")
    assert code == 0
    c, d, a, s = table_cells(out)[10.0]
    for got, want in zip((c, d, a, s), (0.292017, 0.278005, 1.02329, 0.949042)):
        assert got == pytest.approx(want, abs=1e-4)
    assert table_cells(out)[1.0][1] is None


def test_table3_row(capsys):
    _, out = run(capsys, "table", "3")
    _, _, a, s = table_cells(out)[2.0]
    assert a == pytest.approx(0.954930, abs=1e-4)
    assert s == pytest.approx(0.911893, abs=1e-4)


def test_table1_large_eps_row(capsys):
    _, out = run(capsys, "table", "1")
    _, _, a, s = table_cells(out)[100.0]
    assert a == pytest.approx(0.954930, abs=1e-3)
    assert s == pytest.approx(0.911891, abs=1e-3)


@pytest.mark.parametrize("which", [1, 2, 3])
def test_table_check_passes(capsys, which):
    code, _ = run(capsys, "table", str(which), "--check")
    assert code == 0


def test_table_check_failure_exit_code(capsys):
    code, out = run(capsys, "table", "2", "--check", "--tol", "1e-12")
    assert code == 2
    assert "FAIL" in out


def test_are_student_decreasing(capsys):
    code, out = run(capsys, "are", "--j1", "wilcoxon", "--j2", "vdw", "--family", "student", "--range", "2:6:0.5")
    assert code == 0
    vals = [float(r[1]) for r in rows(out)[1:]]
    assert len(vals) == 9 and all(a > b for a, b in zip(vals, vals[1:]))


def test_are_powerexp_serial_interior_max(capsys):
    _, out = run(capsys, "are", "--j1", "wilcoxon", "--j2", "vdw", "--family", "powerexp",
                 "--range", "0.2:3:0.1", "--serial")
    r = rows(out)
    assert r[0] == ["param", "ARE", "ARE_serial"]
    params = [float(x[0]) for x in r[1:]]
    serial = [float(x[2]) for x in r[1:]]
    best = params[int(np.argmax(serial))]
    assert 0.2 < best < 3.0 and abs(best - 0.51) <= 0.1


def test_are_cauchy_below_bound(capsys):
    _, out = run(capsys, "are", "--j1", "cauchy", "--j2", "vdw", "--family", "student", "--range", "0.2:5:0.2")
    vals = [float(r[1]) for r in rows(out)[1:]]
    assert len(vals) == 25 and max(vals) <= 4 * math.pi


def test_are_divergent_cells_empty(capsys):
    _, out = run(capsys, "are", "--j1", "wilcoxon", "--j2", "vdw", "--family", "student", "--range", "1:3:1",
                 "--serial")
    r = rows(out)[1:]
    assert r[0][2] == "" and r[1][2] != ""


def test_bounds_values(capsys):
    _, out = run(capsys, "bounds")
    got = {(r[0], r[1]): float(r[2]) for r in rows(out)[1:]}
    assert got[("W_vs_vdW", "")] == pytest.approx(6 / math.pi)
    assert got[("Cauchy_vs_vdW", "")] == pytest.approx(4 * math.pi)
    assert got[("student_vs_W", "1")] == pytest.approx(2 * math.pi**2 / 3)
    assert got[("serial_SWW_vs", "vdw,vdw")] == pytest.approx(36 / math.pi**2)


def test_autocorr(capsys, tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("\n".join(str(v) for v in np.random.default_rng(0).standard_normal(30)))
    code, out = run(capsys, "autocorr", "--file", str(p), "--lags", "1,3", "--stat", "kendall")
    assert code == 0
    r = rows(out)
    assert r[0][0] == "lag" and [x[0] for x in r[1:]] == ["1", "3"]


def test_autocorr_ties_error(capsys, tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1\n2\n2\n3\n4\n")
    assert cli.main(["autocorr", "--file", str(p)]) == 1
    assert "tied" in capsys.readouterr().err.lower()
    assert cli.main(["autocorr", "--file", str(p), "--ties", "random:1"]) == 0


def test_missing_file_is_error(capsys):
    assert cli.main(["autocorr", "--file", "/nonexistent/x"]) == 1


def test_bad_range(capsys):
    assert cli.main(["are", "--j1", "w", "--j2", "vdw", "--family", "student", "--range", "3:1:1"]) == 1


def test_gaussian_check(capsys):
    code, out = run(capsys, "gaussian-check")
    assert code == 0
    assert {r[0] for r in rows(out)[1:]} == {"C", "D", "ARE", "ARE_serial"}


def test_byte_stable_outputs(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"reps": 400, "seed": 5, "runs": [
        {"kind": "two_sample", "family": "student:3", "score": "wilcoxon", "delta": 0.4, "n": 15}]}))
    for argv in (["simulate", "--config", str(cfg)], ["table", "3"], ["bounds"]):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["-o", str(a), *argv]) == 0
        assert cli.main(["-o", str(b), *argv]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_reference_tables_shape():
    assert len(reference.TABLE1) == 9 and len(reference.TABLE2) == 8 and len(reference.TABLE3) == 5
