"""End-to-end command tests: exit codes, output formats, determinism."""

import csv
import io
import json
import math

import pytest

from iondfs.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestCnotVerify:
    def test_default_passes(self, capsys):
        code, out, err = run_cli(capsys, "cnot-verify")
        assert code == 0
        assert "result: PASS" in err
        assert "global phase vs truth table: -1.000000000+0.000000000j" in err
        rows = parse_csv(out)
        assert len(rows) == 4
        assert all(float(r["column_deviation"]) <= 1e-12 for r in rows)

    def test_wrong_angle_fails(self, capsys):
        code, out, err = run_cli(capsys, "cnot-verify", "--set", f"cnot_theta={math.pi/4}")
        assert code == 2
        assert "result: FAIL" in err

    def test_malformed_config(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("not a config line\n")
        code, out, err = run_cli(capsys, "cnot-verify", "--config", str(bad))
        assert code == 1
        assert "error:" in err and "key = value" in err

    def test_unknown_key_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("bogus = 1\n")
        code, _, err = run_cli(capsys, "cnot-verify", "--config", str(bad))
        assert code == 1
        assert "unknown config key" in err


class TestTeleport:
    def test_default_grid(self, capsys):
        code, out, err = run_cli(capsys, "teleport")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 32  # 8 phases x 4 outcomes
        assert all(float(r["fidelity"]) >= 1 - 1e-9 for r in rows)
        assert all(abs(float(r["probability"]) - 0.25) <= 1e-10 for r in rows)

    def test_paper_table_reports_discrepancy(self, capsys):
        code, out, err = run_cli(capsys, "teleport", "--paper-table")
        assert code == 2
        assert "DISCREPANCY" in err
        rows = parse_csv(out)
        failing = [r for r in rows if float(r["fidelity"]) < 1 - 1e-9]
        assert len(failing) == 24  # all outcomes fail except at theta = 0 and pi

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "teleport", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        assert doc["config"]["theta_steps"] == 8
        assert len(doc["rows"]) == 32

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "teleport.csv"
        code, out, err = run_cli(capsys, "teleport", "--out", str(target))
        assert code == 0
        assert out == ""  # rows went to the file instead
        rows = parse_csv(target.read_text())
        assert len(rows) == 32


class TestRabi:
    def test_default_sweep(self, capsys):
        code, out, err = run_cli(capsys, "rabi")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 6
        assert [r["oracle_status"] for r in rows] == ["ok"] * 6
        assert all(float(r["relative_error"]) <= 0.02 for r in rows)
        base = float(rows[0]["effective_rabi"])
        # CSV carries 12 significant digits, so ratios are good to ~1e-10 here
        for n, row in enumerate(rows):
            assert float(row["effective_rabi"]) / base == pytest.approx(2 * n + 1, rel=1e-10)

    def test_breakdown_row_skipped(self, capsys):
        code, out, err = run_cli(
            capsys, "rabi", "--set", "lamb_dicke=3.45", "--set", "sweep_steps=1"
        )
        assert code == 0  # no oracle rows ran, so nothing failed
        rows = parse_csv(out)
        assert rows[0]["verdict"] == "fail"
        assert rows[0]["oracle_status"] == "skipped"
        assert rows[0]["oracle_frequency"] == "n/a"

    def test_bad_sweep_param(self, capsys):
        code, _, err = run_cli(capsys, "rabi", "--set", "sweep_param=flux")
        assert code == 1
        assert "sweep_param" in err

    def test_json_serializable_including_float_sweep(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "rabi",
            "--format", "json",
            "--set", "sweep_param=lamb_dicke",
            "--set", "sweep_min=0.05",
            "--set", "sweep_max=0.115",
            "--set", "sweep_steps=2",
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["rows"]) == 2
        assert all(isinstance(r["oracle_frequency"], float) for r in doc["rows"])


class TestTiming:
    def test_paper_preset(self, capsys):
        code, out, err = run_cli(capsys, "timing", "--preset", "paper")
        assert code == 0
        rows = parse_csv(out)
        t_cn = float(rows[0]["t_cnot"])
        assert t_cn == pytest.approx(1.134e-3, rel=0.01)
        assert float(rows[0]["ratio_to_reference"]) == pytest.approx(1.62, abs=0.01)
        assert "ambiguous" in err  # the Lamb-Dicke reading caveat is printed
        assert "0.0007" in err

    def test_fock_scaling(self, capsys):
        _, out0, _ = run_cli(capsys, "timing")
        _, out1, _ = run_cli(capsys, "timing", "--set", "fock_n=1")
        t0 = float(parse_csv(out0)[0]["t_cnot"])
        t1 = float(parse_csv(out1)[0]["t_cnot"])
        assert t0 / t1 == pytest.approx(3.0, rel=1e-10)

    def test_bell_is_third_of_cnot(self, capsys):
        _, out, _ = run_cli(capsys, "timing")
        row = parse_csv(out)[0]
        assert float(row["t_cnot"]) / float(row["t_bell"]) == pytest.approx(3.0, rel=1e-10)

    def test_no_reference_without_preset(self, capsys):
        _, out, err = run_cli(capsys, "timing")
        assert parse_csv(out)[0]["ratio_to_reference"] == "n/a"
        assert "published" not in err


class TestDephase:
    def test_default_grid(self, capsys):
        code, out, err = run_cli(capsys, "dephase")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 8  # 4 sigmas x {dfs, bare}
        expected = {"0": 1.0, "0.5": 0.941, "1": 0.803, "2": 0.568}
        for row in rows:
            if row["state"] == "dfs":
                assert float(row["mean_fidelity"]) >= 1 - 1e-9
            else:
                mean = float(row["mean_fidelity"])
                stderr = float(row["stderr"]) if row["stderr"] != "n/a" else 0.0
                assert abs(mean - expected[row["sigma"]]) <= max(4 * stderr, 1e-3)

    def test_byte_determinism(self, capsys):
        code1, out1, err1 = run_cli(capsys, "dephase", "--seed", "777")
        code2, out2, err2 = run_cli(capsys, "dephase", "--seed", "777")
        assert (code1, out1, err1) == (code2, out2, err2)

    def test_different_seed_changes_samples(self, capsys):
        _, out1, _ = run_cli(capsys, "dephase", "--seed", "1")
        _, out2, _ = run_cli(capsys, "dephase", "--seed", "2")
        assert out1 != out2

    def test_single_sample_stderr_marker(self, capsys):
        code, out, _ = run_cli(capsys, "dephase", "--set", "noise_samples=1")
        assert code == 0
        rows = parse_csv(out)
        assert all(r["stderr"] == "n/a" for r in rows)


class TestPlumbing:
    def test_config_file_and_override_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("theta_steps = 4\nseed = 5\n")
        _, out, _ = run_cli(capsys, "teleport", "--config", str(cfg))
        assert len(parse_csv(out)) == 16
        _, out, _ = run_cli(capsys, "teleport", "--config", str(cfg), "--set", "theta_steps=2")
        assert len(parse_csv(out)) == 8

    def test_hz_unit_conversion(self, capsys, tmp_path):
        cfg = tmp_path / "hz.cfg"
        cfg.write_text("freq_unit = hz\nrabi = 500e3\ntrap_freq = 5e6\ndetuning = 5e6\n")
        _, out_hz, _ = run_cli(capsys, "timing", "--config", str(cfg))
        _, out_default, _ = run_cli(capsys, "timing")
        assert parse_csv(out_hz)[0]["t_cnot"] == parse_csv(out_default)[0]["t_cnot"]

    def test_bad_flag_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "teleport", "--format", "xml")
        assert code == 1

    def test_missing_subcommand_exits_one(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 1

    def test_figures_written(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "dephase", "--figures", str(tmp_path / "figs"))
        assert code == 0
        png = tmp_path / "figs" / "dephase.png"
        assert png.exists() and png.stat().st_size > 1000
        assert "figure written" in err

    def test_csv_config_embedded(self, capsys):
        _, out, _ = run_cli(capsys, "teleport")
        comments = [ln for ln in out.splitlines() if ln.startswith("#")]
        assert any("command = teleport" in ln for ln in comments)
        assert any("seed = 12345" in ln for ln in comments)
