"""CLI contract: subcommands, exit codes, reproducibility."""

import csv
import json

import pytest

from cdcalc import cli


def run_cli(*argv):
    return cli.main(list(argv))


def test_models_list(capsys):
    assert run_cli("models", "list") == 0
    payload = json.loads(capsys.readouterr().out)
    assert "heisenberg1" in payload and "su2" in payload
    assert payload["su2"]["reference_cd"]["rho1"] == 1.0


def test_certify_report_schema(tmp_path):
    out = tmp_path / "cert.json"
    code = run_cli(
        "certify", "--model", "heisenberg1", "--rho2", "0.5",
        "--kappa", "1", "--dim", "2", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload) >= {"params", "grid", "cells", "verdict"}
    assert payload["verdict"].startswith("certified")
    cell = payload["cells"][0]
    assert set(cell) == {"point", "nu", "min_eig", "psd"}
    assert len(payload["grid"]["nu"]) == 13


def test_certify_failure_exit_code(tmp_path):
    out = tmp_path / "cert.json"
    code = run_cli(
        "certify", "--model", "heisenberg1", "--rho1", "1.0",
        "--rho2", "0.5", "--kappa", "1", "--dim", "2", "--out", str(out),
    )
    assert code == 1
    assert json.loads(out.read_text())["verdict"] == "violated"


def test_certify_unknown_model():
    assert run_cli(
        "certify", "--model", "nope", "--rho2", "1", "--kappa", "1",
        "--dim", "2",
    ) == 2


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spec.csv"
    code = run_cli(
        "spectrum", "--model", "su2", "--grid", "8", "--count", "10",
        "--out", str(out),
    )
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["index", "eigenvalue"]
    assert len(rows) == 11
    assert float(rows[1][1]) == 0.0
    assert float(rows[2][1]) > 0.3


def test_verify_pass_and_report(tmp_path):
    out = tmp_path / "lich.json"
    code = run_cli(
        "verify", "--model", "su2", "--inequality", "lichnerowicz",
        "--seed", "3", "--grid", "10", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["passed"] is True
    assert payload["model"] == "su2"


def test_verify_regime_mismatch_is_config_error():
    code = run_cli(
        "verify", "--model", "su2", "--inequality", "reverse-poincare",
        "--seed", "3", "--grid", "8", "--rho1", "0",
    )
    assert code == 2


def test_verify_dual_exponent_flag(tmp_path):
    out = tmp_path / "pp.json"
    code = run_cli(
        "verify", "--model", "heisenberg1", "--inequality", "pseudo-poincare",
        "--seed", "3", "--grid", "8", "--p", "4", "--dual-exponent",
        "--out", str(out),
    )
    assert code == 0


def test_geometry_ball_volume(capsys):
    code = run_cli(
        "geometry", "ball-volume", "--r", "1.0", "--samples", "20000",
        "--seed", "5",
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert 0.6 < payload["value"] < 1.0
    assert payload["stderr"] > 0


def test_geometry_perimeter(capsys):
    code = run_cli(
        "geometry", "perimeter", "--set", "gauge-ball", "--param", "1.0",
        "--resolution", "32",
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["value"] - 3.7634) < 0.01
    assert payload["richardson_delta"] < 1e-3


def _write_config(path, **fields):
    cfg = {
        "model": "heisenberg1",
        "seed": 11,
        "grid": 8,
        "checks": ["certify", "pseudo-poincare-spectral"],
    }
    cfg.update(fields)
    path.write_text(json.dumps(cfg))
    return path


def test_run_pass_writes_artifacts(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json", out=str(tmp_path / "out"))
    assert run_cli("run", "--config", str(cfg)) == 0
    out = tmp_path / "out"
    assert (out / "report.json").exists()
    assert (out / "summary.csv").exists()
    assert (out / "violations.png").stat().st_size > 0
    assert (out / "spectrum.png").stat().st_size > 0
    report = json.loads((out / "report.json").read_text())
    rows = list(csv.reader((out / "summary.csv").open()))[1:]
    # every CSV number appears in the JSON
    by_name = {r["name"]: r for r in report["reports"]}
    for name, viol, tol, ok in rows:
        assert float(viol) == pytest.approx(by_name[name]["max_violation"])
        assert float(tol) == by_name[name]["tolerance"]


def test_run_reproducible_csv(tmp_path):
    cfg1 = _write_config(tmp_path / "c1.json", out=str(tmp_path / "o1"))
    cfg2 = _write_config(tmp_path / "c2.json", out=str(tmp_path / "o2"))
    assert run_cli("run", "--config", str(cfg1)) == 0
    assert run_cli("run", "--config", str(cfg2)) == 0
    a = (tmp_path / "o1" / "summary.csv").read_bytes()
    b = (tmp_path / "o2" / "summary.csv").read_bytes()
    assert a == b


def test_run_check_failure_still_writes_report(tmp_path, capsys):
    cfg = _write_config(
        tmp_path / "cfg.json",
        model="su2",
        grid=8,
        cd={"source": "explicit", "rho1": 3.0, "rho2": 0.5, "kappa": 1.0, "d": 2},
        checks=["certify", "lichnerowicz"],
        out=str(tmp_path / "out"),
    )
    assert run_cli("run", "--config", str(cfg)) == 1
    rows = list(csv.reader((tmp_path / "out" / "summary.csv").open()))
    assert rows[1][0] == "certify" and rows[1][3] == "false"


def test_run_error_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run_cli("run", "--config", str(bad)) == 2
    noseed = tmp_path / "noseed.json"
    noseed.write_text(json.dumps({"model": "heisenberg1"}))
    assert run_cli("run", "--config", str(noseed)) == 2
    unknown = tmp_path / "unk.json"
    unknown.write_text(json.dumps({"model": "nope", "seed": 1}))
    assert run_cli("run", "--config", str(unknown)) == 2
    cap = tmp_path / "cap.json"
    cap.write_text(
        json.dumps({"model": "heisenberg1", "seed": 1, "grid": 100})
    )
    assert run_cli("run", "--config", str(cap)) == 3
    badcheck = _write_config(
        tmp_path / "bc.json", checks=["nonsense"], out=str(tmp_path / "x")
    )
    assert run_cli("run", "--config", str(badcheck)) == 2


def test_run_flag_overrides_config(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json", out=str(tmp_path / "o1"))
    assert run_cli(
        "run", "--config", str(cfg), "--out", str(tmp_path / "flagged")
    ) == 0
    assert (tmp_path / "flagged" / "summary.csv").exists()
