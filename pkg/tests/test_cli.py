import csv
import io
import json
import os
import subprocess
import sys

import pytest

from twoway_ic.cli import COLUMNS, main


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def run_proc(argv, env=None):
    full_env = {**os.environ, **(env or {})}
    return subprocess.run([sys.executable, "-m", "twoway_ic", *argv], capture_output=True, text=True, env=full_env)


def test_bounds_json():
    code, out = run(["bounds", "--snr-db", "20", "--inr-db", "10"])
    assert code == 0
    doc = json.loads(out)
    assert doc["regime"]["class"] == "weak"
    assert doc["bounds"]["full_sym"] == pytest.approx(5.3899, abs=1e-4)
    bwd = [g for g in doc["gaps"] if g["direction"] == "backward"]
    assert bwd[0]["gap_bits"] == pytest.approx(1.0, abs=1e-12)


def test_bounds_very_strong():
    code, out = run(["bounds", "--snr-db", "10", "--inr-db", "23.01"])
    doc = json.loads(out)
    assert doc["regime"]["class"] == "very_strong"
    assert doc["gaps"][0]["gap_bits"] == 0.0


def test_bounds_text():
    code, out = run(["bounds", "--snr-db", "20", "--inr-db", "10", "--format", "text"])
    assert code == 0
    assert "regime           weak" in out
    assert "weak_hk2_bwd_case1" in out and "PASS" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["bounds", "--snr-db", "-inf", "--inr-db", "0"],
        ["bounds", "--snr-db=-inf", "--inr-db", "0"],
        ["bounds", "--snr-db", "nan", "--inr-db", "0"],
        ["bounds", "--snr-db", "1"],
        ["sweep", "--snr-db", "0:10:0", "--inr-db", "0:1:1"],
        ["sweep", "--snr-db", "0:10:-1", "--inr-db", "0:1:1"],
        ["verify-gaps", "--override-ceiling", "nosuchrow=1"],
        ["oracle", "variance", "--snr-db", "20", "--inr-db", "10"],
        ["oracle", "variance", "--snr-db", "20", "--inr-db", "10", "--samples", "4", "--seed", "1"],
        ["oracle", "lambda", "--snr-db", "20", "--inr-db", "10", "--n-mag", "1"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv, out=io.StringIO())
    assert exc.value.code == 1


def test_small_samples_message(capsys):
    with pytest.raises(SystemExit):
        main(["oracle", "variance", "--snr-db", "1", "--inr-db", "1", "--samples", "4", "--seed", "1"])
    assert "samples too small" in capsys.readouterr().err


def test_sweep_csv_schema():
    code, out = run(["sweep", "--snr-db", "0:4:1", "--inr-db", "0:4:1"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# schema=1"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert list(rows[0].keys()) == COLUMNS
    pts = [(float(r["snr_db"]), float(r["inr_db"])) for r in rows]
    assert pts == sorted(pts)  # SNR outer, INR inner
    assert len(set(pts)) == 25
    for r in rows:
        assert float(r["gap_bits"]) <= float(r["ceiling_bits"]) + 1e-9
        assert r["pass"] == "true"


def test_sweep_full_grid_point_count():
    code, out = run(["sweep", "--snr-db", "0:60:1", "--inr-db", "0:60:1"])
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    assert len({(r["snr_db"], r["inr_db"]) for r in rows}) == 61 * 61


def test_sweep_regime_filter_empty():
    code, out = run(["sweep", "--snr-db", "0:2:1", "--inr-db", "40:45:1", "--regime", "weak"])
    assert code == 0
    assert out.splitlines() == ["# schema=1", ",".join(COLUMNS)]


def test_sweep_json_lines():
    code, out = run(["sweep", "--snr-db", "20", "--inr-db", "10", "--format", "json"])
    objs = [json.loads(line) for line in out.splitlines()]
    assert len(objs) == 2
    assert list(objs[0].keys()) == COLUMNS
    assert objs[1]["row"] == "weak_hk2_bwd_case1"


def test_csv_round_trip():
    code, out = run(["sweep", "--snr-db", "0:30:5", "--inr-db", "0:30:5"])
    _, js = run(["sweep", "--snr-db", "0:30:5", "--inr-db", "0:30:5", "--format", "json"])
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    objs = [json.loads(line) for line in js.splitlines()]
    for r, o in zip(rows, objs):
        assert float(r["gap_bits"]) == o["gap_bits"]
        assert float(r["full_sym"]) == o["full_sym"]


def test_verify_gaps_default_passes():
    code, out = run(["verify-gaps"])
    assert code == 0
    assert out.strip().endswith("overall: PASS")
    assert out.count("PASS") == 8


def test_verify_gaps_override_fails():
    code, out = run(["verify-gaps", "--override-ceiling", "strong=0.1"])
    assert code == 2
    assert "FAIL" in out


def test_verify_gaps_tol_does_not_change_verdicts():
    _, a = run(["verify-gaps", "--format", "json"])
    _, b = run(["verify-gaps", "--format", "json", "--tol", "1e-6"])
    va = [r["passed"] for r in json.loads(a)["rows"]]
    vb = [r["passed"] for r in json.loads(b)["rows"]]
    assert va == vb and all(va)


def test_oracle_lambda_cli():
    code, out = run(["oracle", "lambda", "--snr-db", "20", "--inr-db", "10", "--n-mag", "2001", "--n-theta", "720"])
    assert code == 0
    assert "PASS: argmax (0.3160, 0.0000)" in out


def test_oracle_variance_cli():
    argv = ["oracle", "variance", "--quantity", "fwd_var", "--snr-db", "20", "--inr-db", "10", "--samples", "1000000", "--seed", "7"]
    code, out = run(argv)
    assert code == 0
    doc = json.loads(out[: out.rindex("}") + 1])
    est = doc["estimates"][0]
    assert est["passed"] and est["rng"].startswith("numpy.PCG64")
    assert est["closed_form"] == pytest.approx(20.0909, abs=1e-4)


def test_oracle_entropy_theta_sweep_cli():
    argv = ["oracle", "entropy", "--quantity", "bwd_var", "--snr-db", "20", "--inr-db", "10",
            "--samples", "100000", "--seed", "3", "--theta-sweep", "8"]  # fmt: skip
    code, out = run(argv)
    doc = json.loads(out[: out.rindex("}") + 1])
    assert code == 0 and doc["theta_argmax"] == 0.0 and len(doc["estimates"]) == 8


def test_sweep_and_oracle_byte_identical_across_threads():
    sweep = ["sweep", "--snr-db", "0:20:1", "--inr-db", "0:20:1"]
    oracle = ["oracle", "variance", "--quantity", "bwd_var", "--snr-db", "10", "--inr-db", "5", "--samples", "200000", "--seed", "11"]
    for argv in (sweep, oracle):
        outs = [run_proc(argv, {"TWOWAY_IC_THREADS": t}).stdout for t in ("1", "8", "1")]
        assert outs[0] == outs[1] == outs[2] and outs[0]


def test_module_entry_point_exit_codes():
    assert run_proc(["bounds", "--snr-db", "-inf"]).returncode == 1
    assert run_proc(["verify-gaps", "--override-ceiling", "strong=0.1"]).returncode == 2
    assert run_proc(["verify-gaps"]).returncode == 0
