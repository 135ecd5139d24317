"""CLI dispatch, report determinism, suite aggregation, exit codes."""

import json
import os

import numpy as np
import pytest

from almqr.cli import main
from almqr.reports import stable_body
from almqr.runner import CHECKS, run_check


def run_cli(*argv):
    return main(list(argv))


def test_inverse_command(capsys):
    code = run_cli("inverse", "--map", '{"map":"poly","coeffs":[-1,0,1]}', "--y", "[0,0]")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["n"] == 2
    xs = sorted(round(p["x"][0], 8) for p in out["points"])
    assert xs == [-1.0, 1.0]


def test_inverse_malformed_map(capsys):
    assert run_cli("inverse", "--map", '{"map":"bogus"}', "--y", "[0,0]") == 2
    assert run_cli("inverse", "--map", "not json", "--y", "[0,0]") == 2


def test_form_comass_command(capsys):
    code = run_cli(
        "form", "comass", "--form", '{"kind":"trace_vol","n":2,"d":2}', "--point", "[0.1,0.2,0.3,0.4]"
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["value"] == pytest.approx(1.0, abs=1e-6)


def test_verify_writes_report_and_csv(tmp_path, capsys):
    report = tmp_path / "r.json"
    csvf = tmp_path / "r.csv"
    code = run_cli(
        "verify",
        "qr-curve",
        "--map",
        '{"map":"power","k":2}',
        "--samples",
        "500",
        "--seed",
        "3",
        "--out",
        str(report),
        "--csv",
        str(csvf),
    )
    assert code == 0
    rec = json.loads(report.read_text())
    assert rec["check"] == "qr-curve"
    assert rec["claim_id"] == "qr-curve-bound"
    assert rec["pass"] is True
    assert csvf.exists() and "bin_lo" in csvf.read_text()
    capsys.readouterr()


def test_report_determinism(tmp_path, capsys):
    args = [
        "verify",
        "monodromy",
        "--seed",
        "9",
    ]
    r1 = tmp_path / "a.json"
    r2 = tmp_path / "b.json"
    assert run_cli(*args, "--out", str(r1)) == 0
    assert run_cli(*args, "--out", str(r2)) == 0
    capsys.readouterr()
    assert stable_body(r1.read_text()) == stable_body(r2.read_text())


def test_verify_failure_exit_code(tmp_path, capsys):
    # an impossible tolerance forces a check failure -> exit 1
    code = run_cli(
        "verify",
        "modulus",
        "--config",
        json.dumps({"grid": 32, "tol": 1e-9, "family": {"family": "radial", "count": 64}}),
    )
    capsys.readouterr()
    assert code == 1


def test_suite_empty_manifest(tmp_path, capsys):
    mf = tmp_path / "m.json"
    mf.write_text(json.dumps({"runs": []}))
    assert run_cli("suite", "--manifest", str(mf)) == 0
    capsys.readouterr()


def test_suite_aggregation_and_summary(tmp_path, capsys):
    mf = tmp_path / "m.json"
    mf.write_text(
        json.dumps(
            {
                "runs": [
                    {"id": "mono", "check": "monodromy", "config": {}},
                    {
                        "id": "bad-modulus",
                        "check": "modulus",
                        "config": {"grid": 32, "tol": 1e-9, "family": {"family": "radial", "count": 64}},
                    },
                ]
            }
        )
    )
    outdir = tmp_path / "reports"
    summary = tmp_path / "summary.md"
    code = run_cli("suite", "--manifest", str(mf), "--out", str(outdir), "--summary", str(summary))
    capsys.readouterr()
    assert code == 1  # one row fails
    text = summary.read_text()
    assert "| mono | monodromy | monodromy-loop | PASS |" in text
    assert "FAIL" in text
    assert (outdir / "mono.json").exists()
    assert (outdir / "bad-modulus.json").exists()


def test_builtin_manifest_loads():
    from importlib import resources

    text = resources.files("almqr").joinpath("data/acceptance_manifest.json").read_text()
    manifest = json.loads(text)
    names = {entry["check"] for entry in manifest["runs"]}
    assert names <= set(CHECKS)
    assert len(manifest["runs"]) >= 19


def test_run_check_unknown():
    with pytest.raises(KeyError):
        run_check("no-such-check", {})


def test_sample_ahlfors_cli(tmp_path, capsys):
    code = run_cli(
        "sample",
        "ahlfors",
        "--map",
        '{"map":"power","k":2}',
        "--centers",
        "[[1.0, 0.0]]",
        "--radii",
        "0.05,0.1",
        "--N",
        "5000",
        "--seed",
        "7",
        "--csv",
        str(tmp_path / "a.csv"),
    )
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["metrics"]["n_balls"] == 2
    assert (tmp_path / "a.csv").exists()


def test_modulus_cli(capsys):
    code = run_cli("modulus", "--grid", "64", "--count", "256", "--seed", "1")
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["metrics"]["rel_error"] < 0.05


def test_format_csv_stdout(capsys):
    code = run_cli(
        "verify", "qr-curve", "--map", '{"map":"power","k":2}', "--samples", "100", "--format", "csv"
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("bin_lo,bin_hi,count")
