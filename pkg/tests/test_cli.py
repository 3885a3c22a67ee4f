"""Command-line interface: exit codes, printed values, manifest round-trips
and the delimited/figure outputs."""

import json
import shutil
import subprocess
import sys

import pytest

from gmhdlab.cli import main

SWEEP_HEADER = "# columns: lam,kappa,verdict,t_blowup_estimate,sup_omega_final,steps,fault"


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_console_script_version():
    exe = shutil.which("gmhdlab")
    assert exe, "console script not on PATH"
    out = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip().startswith("gmhdlab ")


def test_tstar_prints_blowup_time(capsys):
    assert main(["tstar", "--lambda", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1.644934"


def test_tstar_prints_inf_below_half(capsys):
    assert main(["tstar", "--lambda", "0.5"]) == 0
    assert capsys.readouterr().out.strip() == "inf"


def test_tstar_zero_lambda_is_a_fault(capsys):
    assert main(["tstar", "--lambda", "0"]) == 1
    assert "fault: RegimeError" in capsys.readouterr().err


def test_simulate_roundtrip_reproduces_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    rc = main([
        "simulate", "--n", "64", "--horizon", "0.3", "--lambda", "1", "--kappa", "-1",
        "--track", "--no-plot", "--out", str(a),
    ])
    assert rc == 0
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["config_version"] == 1
    assert manifest["results"]["verdict"] == "completed"
    # re-ingesting the manifest reproduces every table byte for byte
    rc = main(["simulate", "--config", str(a / "manifest.json"), "--no-plot", "--out", str(b)])
    assert rc == 0
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()
    assert (a / "trajectories.csv").read_bytes() == (b / "trajectories.csv").read_bytes()


def test_series_csv_holds_data_rows(tmp_path):
    main(["simulate", "--n", "64", "--horizon", "0.05", "--no-plot", "--out", str(tmp_path)])
    lines = (tmp_path / "series.csv").read_text().splitlines()
    assert lines[0].startswith("# columns: t,energy,")
    first = lines[1].split(",")
    assert len(first) == 10
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_simulate_renders_figures(tmp_path):
    rc = main(["simulate", "--n", "64", "--horizon", "0.05", "--track", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "series.png").stat().st_size > 0
    assert (tmp_path / "trajectories.png").stat().st_size > 0


def test_simulate_unknown_preset_exits_2(tmp_path, capsys):
    rc = main(["simulate", "--u0", "wobble:3", "--no-plot", "--out", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"frobnicate": 1}))
    rc = main(["simulate", "--config", str(cfg), "--no-plot", "--out", str(tmp_path)])
    assert rc == 2


def test_gmhd_out_env_sets_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("GMHD_OUT", str(tmp_path))
    rc = main(["simulate", "--n", "64", "--horizon", "0.05", "--no-plot"])
    assert rc == 0
    assert (tmp_path / "series.csv").exists()


def test_verify_passing_scenario(tmp_path, capsys):
    rc = main(["verify", "--scenario", "thm8.1", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "status ok" in out and "PASS" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] is True


def test_verify_failing_assertion_exits_1(tmp_path):
    # a horizon too short for the detector leaves a flag unmet
    rc = main(["verify", "--scenario", "thm4.1", "--set", "horizon=0.3",
               "--out", str(tmp_path)])
    assert rc == 1
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] is False
    assert report["status"] == "ok"


def test_verify_set_with_all_rejected(tmp_path):
    rc = main(["verify", "--scenario", "all", "--set", "n=64", "--out", str(tmp_path)])
    assert rc == 2


def test_verify_unknown_option_exits_2(tmp_path):
    rc = main(["verify", "--scenario", "thm8.1", "--set", "nope=1", "--out", str(tmp_path)])
    assert rc == 2


def test_sweep_writes_csv_with_fault_column(tmp_path):
    rc = main(["sweep", "--pairs", "1,-1", "--n", "64", "--horizon", "0.2",
               "--no-plot", "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 2


def test_sweep_fault_row_exits_1(tmp_path, capsys):
    rc = main(["sweep", "--pairs", "1,-1", "--bc", "periodic", "--n", "64",
               "--horizon", "0.2", "--no-plot", "--out", str(tmp_path)])
    assert rc == 1
    assert "fault=ConsistencyError" in capsys.readouterr().out


def test_sweep_bad_pair_exits_2(tmp_path):
    rc = main(["sweep", "--pairs", "1;2", "--no-plot", "--out", str(tmp_path)])
    assert rc == 2


def test_compare_euler_reports_pair(tmp_path, capsys):
    rc = main(["compare-euler", "--n", "128", "--horizon", "0.5", "--no-plot",
               "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "comparison.csv").exists()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["results"]["verdict"] in ("horizon", "divergence_stop", "hypothesis_failed")
    assert "ordering gap min" in capsys.readouterr().out


def test_closed_form_prints_clock_and_blowup(tmp_path, capsys):
    rc = main(["closed-form", "--lambda", "0.75", "--points", "33", "--no-plot",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "tau*: 1.3333333" in out
    assert "blowup time: finite 2.8149213" in out
    assert (tmp_path / "closedform.csv").exists()
