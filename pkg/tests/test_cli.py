import json
import subprocess
import sys

import pytest

from alphasun import cli
from alphasun import ide_solver as ide
from alphasun.errors import SolverError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return [l for l in text.splitlines() if not l.startswith("#")]


def header(text):
    return dict(l[2:].split("=", 1) for l in text.splitlines() if l.startswith("# "))


def test_moments_table(capsys):
    code, out, _ = run(capsys, "moments", "--alpha", "0.5", "--gamma", "1", "--n", "5")
    assert code == 0
    r = rows(out)
    assert r[0] == "n,moment" and len(r) == 6
    n, v = r[1].split(",")
    assert n == "1" and float(v) == pytest.approx(0.7213475, abs=5e-8)
    h = header(out)
    assert {"alpha", "gamma", "seed", "alphasun", "numpy", "scipy"} <= set(h)


def test_density_header_defect(capsys):
    code, out, _ = run(capsys, "density", "--case", "weibull", "--alpha", "0.3", "--gamma", "2")
    assert code == 0
    assert abs(float(header(out)["normalization_defect"])) <= 1e-6
    assert rows(out)[0] == "x,pdf,cdf"


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--alpha", "0.5", "--gamma", "1", "--seed", "42")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])
    assert doc["meta"]["seed"] == 42


def test_deterministic_files(tmp_path, capsys):
    for d in ("a", "b"):
        assert cli.main(["sample", "--alpha", "0.4", "--gamma", "1.5", "--samples", "500",
                         "--seed", "9", "--out", str(tmp_path / d)]) == 0
    a = (tmp_path / "a" / "sample.csv").read_bytes()
    assert a == (tmp_path / "b" / "sample.csv").read_bytes()
    assert len(rows(a.decode())) == 501


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "77")
    code, out, _ = run(capsys, "sample", "--alpha", "0.5", "--gamma", "1", "--samples", "3")
    assert code == 0 and header(out)["seed"] == "77"
    monkeypatch.setenv(cli.SEED_ENV, "x")
    assert run(capsys, "sample", "--alpha", "0.5", "--gamma", "1")[0] == 2


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["moments", "--alpha", "2", "--gamma", "1"],
    ["moments", "--gamma", "1"],
    ["density", "--case", "gumbel", "--alpha", "0.5", "--gamma", "1"],
    ["moments", "--alpha", "0.5", "--gamma", "1", "--format", "xml"],
])
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_numerical_failure_exit_one(monkeypatch, capsys):
    def boom(*a, **k):
        raise SolverError("sweep produced an invalid value", {"index": 3})
    monkeypatch.setattr(ide, "solve_frechet", boom)
    code, _, err = run(capsys, "density", "--alpha", "0.5", "--gamma", "1")
    assert code == 1
    diag = json.loads(err)
    assert diag["error"] == "SolverError" and diag["diagnostics"] == {"index": 3}


def test_json_and_other_commands(capsys):
    code, out, _ = run(capsys, "constant", "--alpha", "0.5", "--gamma", "1", "--format", "json")
    assert code == 0 and json.loads(out)["constant"]["rel_diff"] < 1e-3
    code, out, _ = run(capsys, "perpetuity", "--spec", "jumpless", "--alpha", "1", "--gamma", "1",
                       "--samples", "20000")
    assert code == 0 and len(rows(out)) == 4
    code, out, _ = run(capsys, "simulate", "--law", "exponential-gumbel", "--alpha", "0.5",
                       "--n", "200", "--batch", "2000")
    assert code == 0 and float(rows(out)[1].split(",")[-1]) < 0.05
    code, out, _ = run(capsys, "moments", "--alpha", "0.5", "--gamma", "1", "--case", "zhat", "--n", "2")
    assert code == 0


def test_orders_command(capsys):
    code, out, _ = run(capsys, "orders", "--samples", "20000")
    assert code == 0
    h = header(out)
    assert h["beta_t_monotone"] == "True"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "alphasun.cli", "moments", "--alpha", "0.5", "--gamma", "1",
                        "--n", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.72134752" in r.stdout
