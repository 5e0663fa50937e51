import json

import pytest

from opbmo.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from opbmo.io import load_symbol

from .conftest import A_MAT, DATA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norms_on_shipped_example(capsys):
    code, out, _ = run(capsys, "norms", str(DATA / "haar_root_times_A.json"))
    assert code == EXIT_OK
    doc = json.loads(out)
    for kind in ("bmo_norm", "sbmo", "wbmo", "bmo_mult", "bmo_para"):
        assert doc[kind]["value"] == pytest.approx(2)
        assert set(doc[kind]) >= {"value", "exact", "witness"}
    assert doc["bmo_so"]["value"] == pytest.approx(4)
    assert doc["gram_sbmo"]["value"] == pytest.approx(4)
    assert doc["wbmo"]["exact"] is False


def test_norms_scalar_file(capsys):
    code, out, _ = run(capsys, "norms", str(DATA / "scalar_d3.json"))
    doc = json.loads(out)
    assert code == EXIT_OK and doc["wbmo"]["value"] == doc["bmo_norm"]["value"]


def test_norms_parse_error(tmp_path, capsys):
    doc = json.loads((DATA / "haar_root_times_A.json").read_text())
    doc["coeffs"][1]["matrix"][0] = [[0, 0]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "norms", str(bad))
    assert code == EXIT_USAGE and "/coeffs/1/matrix/0" in err


def test_io_error(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    code, _, err = run(capsys, "norms", str(missing))
    assert code == EXIT_IO and "nope.json" in err


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--seeds", "0")[0] == EXIT_USAGE
    assert run(capsys, "growth", "--dims")[0] == EXIT_USAGE


def test_sweep_command(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "sweep", str(DATA / "haar_root_times_A.json"), "-o", str(out))
    assert code == EXIT_OK
    S = load_symbol(out)
    assert S.mean == pytest.approx(A_MAT.conj().T @ A_MAT)


def test_verify_pass_and_tolerance_zero(capsys):
    code, out, _ = run(capsys, "verify", "--depth", "2", "--dim", "1", "2", "--seeds", "2")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["passed"] and rep["cases"] == 4
    assert all({"name", "residual", "tolerance", "passed"} <= set(c) for c in rep["checks"])
    code, out, _ = run(capsys, "verify", "--depth", "2", "--dim", "2", "--seeds", "1", "--tolerance", "0")
    rep = json.loads(out)
    assert code == EXIT_FAIL and not rep["passed"] and rep["failures"]


def test_average_exact(capsys):
    code, out, _ = run(capsys, "average", "--depth", "2", "--dim", "2", "--kind", "mult",
                       "--check", "sweep", "--check", "pythagoras", "--check", "avchar", "--check", "phinorm",
                       "--check", "bmopara")
    rep = json.loads(out)
    assert code == EXIT_OK, rep
    assert rep["mode"] == "exact" and rep["stderr"] == 0 and rep["samples"] == 8
    assert len(rep["asserts"]) == 1 + 5 + 2 + 3 + 2


def test_average_mc(capsys):
    code, out, _ = run(capsys, "average", "--depth", "4", "--dim", "1", "--mode", "mc", "--samples", "2000",
                       "--check", "sweep")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["mode"] == "monte_carlo" and rep["stderr"] > 0


def test_average_guard(capsys):
    code, _, err = run(capsys, "average", "--depth", "5", "--dim", "1")
    assert code == EXIT_USAGE and "Monte Carlo" in err


def test_growth_command(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, stdout, _ = run(capsys, "growth", "--dims", "1", "2", "--depth", "2", "--seeds", "2", "-o", str(out))
    assert code == EXIT_OK and out.exists() and (tmp_path / "g.summary.csv").exists()
    assert json.loads(stdout)["records"] == 4
    code, _, err = run(capsys, "growth", "--dims", "1", "--seeds", "1", "-o", str(tmp_path / "no" / "g.csv"))
    assert code == EXIT_IO
