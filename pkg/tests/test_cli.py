import json

import pandas as pd
import pytest

from strichartz_gap.main import RunConfig, run_cli


def test_run_cli_version(capsys):
    exit_code = run_cli(["--version"])
    assert exit_code == 0
    captured = capsys.readouterr()
    assert "strichartz-gap 0.1.0" in captured.out


def test_run_cli_without_command_is_usage_error(capsys):
    assert run_cli([]) == 2
    assert "usage" in capsys.readouterr().err


def test_certify_sharp_constant(capsys):
    exit_code = run_cli(["certify", "--lcut", "20"])
    assert exit_code == 0
    captured = capsys.readouterr()
    payload = json.loads(captured.out)
    assert payload["command"] == "certify"
    assert payload["version"] == "0.1.0"
    assert payload["config"]["constant"] == "36/85"
    result = payload["result"]
    assert result["verdict"] == "certified"
    assert [cert["block"] for cert in result["certificates"]] == ["F0", "F1"]
    assert "F0: certified" in captured.err


def test_certify_writes_per_block_certificates(tmp_path):
    out = tmp_path / "cert.json"
    assert run_cli(["certify", "--lcut", "10", "--out", str(out)]) == 0
    assert json.loads(out.read_text(encoding="utf-8"))["result"]["verdict"] == "certified"
    for block in ("F0", "F1"):
        stored = json.loads((tmp_path / f"cert.{block}.json").read_text(encoding="utf-8"))
        assert stored["block"] == block
        assert stored["C"] == "36/85"


def test_certify_larger_constant_reports_binding_row(capsys):
    exit_code = run_cli(["certify", "--C", "1/2", "--lcut", "10"])
    assert exit_code == 1
    captured = capsys.readouterr()
    assert "binding row (2,0)" in captured.err
    assert json.loads(captured.out)["result"]["verdict"] == "falsified"


def test_certify_rejects_non_rational_constant(capsys):
    assert run_cli(["certify", "--C", "0.4.2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_gap_csv_report(tmp_path):
    out = tmp_path / "gap.csv"
    exit_code = run_cli(["gap", "--lmax", "20", "--mmax", "2", "--format", "csv", "--out", str(out)])
    assert exit_code == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("# gap 0.1.0\n")
    table = pd.read_csv(out, comment="#")
    assert len(table) == 6
    assert (table["lambda_min"] >= 36 / 85 - 1e-9).all()


def test_gap_rejects_negative_mmax(capsys):
    assert run_cli(["gap", "--lmax", "10", "--mmax", "-1"]) == 2
    assert "--mmax" in capsys.readouterr().err


def test_deficit_of_default_maximiser(capsys):
    assert run_cli(["deficit", "--lmax", "4"]) == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert result["deficit"] == pytest.approx(0.0, abs=1e-10)


def test_deficit_from_profile_files(tmp_path, capsys):
    position = tmp_path / "f0.json"
    position.write_text(json.dumps({"kind": "maximiser", "component": "f0"}), encoding="utf-8")
    velocity = tmp_path / "f1.json"
    velocity.write_text(
        json.dumps({"kind": "gaussian", "component": "f1", "params": {"amplitude": 0.1, "width": 1.0}}),
        encoding="utf-8",
    )
    exit_code = run_cli(
        ["deficit", "--lmax", "8", "--profile", str(position), "--profile", str(velocity)]
    )
    assert exit_code == 0
    result = json.loads(capsys.readouterr().out)["result"]
    assert result["deficit"] >= -1e-10
    assert result["lmax"] == 8


def test_deficit_taylor_mode(capsys):
    assert run_cli(["deficit", "--taylor", "--lmax", "2"]) == 0
    captured = capsys.readouterr()
    result = json.loads(captured.out)["result"]
    assert result["limiting_ratio"] == pytest.approx(0.3, abs=0.02)
    assert len(result["rows"]) == 4
    assert "limiting ratio" in captured.err


def test_deficit_reports_profile_field(tmp_path, capsys):
    profile = tmp_path / "bad.json"
    profile.write_text(json.dumps({"kind": "spiral"}), encoding="utf-8")
    assert run_cli(["deficit", "--profile", str(profile)]) == 2
    assert "field: kind" in capsys.readouterr().err


def test_audit_passes_and_detects_perturbation(capsys):
    assert run_cli(["audit", "--lmax", "8", "--mmax", "3", "--samples", "3"]) == 0
    passed = json.loads(capsys.readouterr().out)["result"]
    assert passed["passed"] is True
    assert run_cli(["audit", "--lmax", "8", "--mmax", "3", "--samples", "3", "--perturb-norm", "1e-3"]) == 1
    assert "orthonormality: FAIL" in capsys.readouterr().err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(command="gap", lmax=0)
    with pytest.raises(ValueError):
        RunConfig(command="deficit", epsilons=(0.1, 0.0))
    config = RunConfig(command="certify", constant="18/85")
    assert config.constant_fraction.denominator == 85
    assert config.to_json()["epsilons"] == [0.1, 0.05, 0.025, 0.0125]
