import json
import logging

import numpy as np
import pytest

from lislam.cli import (
    build_summary,
    emit_csv,
    parse_config,
    read_csv,
    run_command,
    _csv_header,
)
from lislam.errors import ParseError, ValidationError
from lislam.simkit import reference_scenario, run_simulation


@pytest.fixture(scope="module")
def reference_log():
    return run_simulation(reference_scenario())


class TestParseConfig:
    def test_preset_values(self):
        cfg = parse_config(None, preset="paper_default")
        assert (cfg.gains.k_r, cfg.gains.k_v, cfg.gains.k_x, cfg.gains.k_p) == (2.0, 2.0, 1.0, 4.0)
        assert cfg.n == 5
        assert cfg.rate_hz == 500.0 and cfg.duration_s == 10.0
        assert cfg.integrator == "euler"
        assert np.allclose(cfg.true_init.landmarks[:, 0], [0.5, 0.5, 0.0])
        assert np.allclose(cfg.true_init.landmarks[:, 4], [-1.2, -1.2, 0.0])

    def test_preset_with_override(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": {"duration_s": 2.5}}))
        cfg = parse_config(path, preset="paper_default")
        assert cfg.duration_s == 2.5
        assert cfg.n == 5

    def test_missing_duration_defaults_with_warning(self, tmp_path, caplog):
        base = parse_config(None, preset="paper_default")
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "scenario": {
                "n": 5,
                "gains": {"k_r": 2.0, "k_v": 2.0, "k_x": 1.0, "k_p": 4.0},
                "true_init": {
                    "r": np.eye(3).tolist(),
                    "v": [0.0, 1.0, 0.0],
                    "x": [1.0, 0.0, 1.0],
                    "landmarks": base.true_init.landmarks.T.tolist(),
                },
                "est_init": {
                    "r": np.eye(3).tolist(),
                    "v": [0.0, 0.0, 0.0],
                    "x": [0.0, 0.0, 0.0],
                    "landmarks": np.zeros((5, 3)).tolist(),
                },
            }
        }))
        with caplog.at_level(logging.WARNING, logger="lislam"):
            cfg = parse_config(path)
        assert cfg.duration_s == 10.0
        assert any("duration_s" in rec.message for rec in caplog.records)

    def test_invalid_gain_named(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": {"gains": {"k_r": 2.0, "k_v": -1.0, "k_x": 1.0, "k_p": 4.0}}}))
        with pytest.raises(ValidationError) as info:
            parse_config(path, preset="paper_default")
        assert "gains" in str(info.value)
        assert "k_v" in str(info.value)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": {"nn": 4}}))
        with pytest.raises(ValidationError) as info:
            parse_config(path, preset="paper_default")
        assert "nn" in str(info.value)

    def test_malformed_json_reports_position(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{\n  "scenario": {,}\n}')
        with pytest.raises(ParseError) as info:
            parse_config(path)
        assert info.value.line == 2
        assert info.value.column > 0

    def test_required_keys_without_preset(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": {"n": 2}}))
        with pytest.raises(ValidationError):
            parse_config(path)


class TestEmitCsv:
    def test_reference_run_row_count(self, reference_log, tmp_path):
        out = tmp_path / "log.csv"
        emit_csv(reference_log, out)
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 5002  # header + one row per sample
        assert lines[0].split(",") == _csv_header(5)

    def test_header_layout(self):
        header = _csv_header(5)
        assert len(header) == 79
        assert header[0] == "t"
        assert header[1:10] == [f"R{i}{j}" for i in range(3) for j in range(3)]
        assert header[10:16] == ["vx", "vy", "vz", "x1", "x2", "x3"]
        assert header[16:19] == ["p1_1", "p1_2", "p1_3"]
        assert header[31] == "hat_R00"
        assert header[61] == "err_att_reduced"
        assert header[-1] == "err_lm5_inertial"
        assert "lyap_V" in header and "lyap_L" in header

    def test_single_sample_log(self, tmp_path):
        log = run_simulation(reference_scenario(duration_s=0.0))
        out = tmp_path / "short.csv"
        emit_csv(log, out)
        assert len(out.read_text().strip().split("\n")) == 2

    def test_byte_identical_reruns(self, tmp_path):
        cfg = reference_scenario(duration_s=0.5)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(run_simulation(cfg), a)
        emit_csv(run_simulation(cfg), b)
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip(self, tmp_path):
        log = run_simulation(reference_scenario(duration_s=0.2))
        out = tmp_path / "rt.csv"
        emit_csv(log, out)
        times, r, v, rh, vh = read_csv(out)
        assert np.array_equal(times, log.times)
        idx = len(times) // 2
        assert np.array_equal(r[idx], log.true_states[idx].r)
        assert np.array_equal(vh[idx], log.est_states[idx].v_block)

    def test_lf_newlines(self, tmp_path):
        log = run_simulation(reference_scenario(duration_s=0.0))
        out = tmp_path / "lf.csv"
        emit_csv(log, out)
        raw = out.read_bytes()
        assert b"\r" not in raw


class TestSummary:
    def test_deterministic_apart_from_wall_clock(self):
        cfg = reference_scenario(duration_s=0.5)
        s1 = build_summary(cfg, run_simulation(cfg), wall_clock_s=0.123)
        s2 = build_summary(cfg, run_simulation(cfg), wall_clock_s=9.876)
        t1 = [line for line in s1.to_text().splitlines() if not line.startswith("wall_clock_s")]
        t2 = [line for line in s2.to_text().splitlines() if not line.startswith("wall_clock_s")]
        assert t1 == t2

    def test_config_echoed(self, reference_log):
        cfg = reference_scenario()
        text = build_summary(cfg, reference_log, 0.0).to_text()
        assert "gains.k_p = 4.0000000000000000e+00" in text
        assert "integrator = euler" in text
        assert "step_count = 5001" in text


class TestRunCommand:
    def test_simulate_with_preset(self, tmp_path, capsys):
        code = run_command(["simulate", "--preset", "paper_default", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "trajectory.csv").exists()
        assert (tmp_path / "summary.txt").exists()

    def test_simulate_zero_duration(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"scenario": {"duration_s": 0.0}}))
        code = run_command(
            ["simulate", str(cfg_path), "--preset", "paper_default", "--out", str(tmp_path)]
        )
        assert code == 0
        lines = (tmp_path / "trajectory.csv").read_text().strip().split("\n")
        assert len(lines) == 2

    def test_certify_reference_eigenvalues(self, capsys):
        assert run_command(["certify", "--preset", "paper_default"]) == 0
        out = capsys.readouterr().out
        eig_lines = [line for line in out.splitlines() if line.startswith("eigenvalue_")]
        assert len(eig_lines) == 6
        values = [float(line.split("=")[1].split()[0]) for line in eig_lines]
        assert sum(abs(v + 4.0) < 1e-9 for v in values) == 4

    def test_align_produces_expected_csv(self, tmp_path):
        run_command(["simulate", "--preset", "paper_default", "--out", str(tmp_path)])
        csv_path = tmp_path / "trajectory.csv"
        code = run_command(["align", str(csv_path), "--preset", "paper_default"])
        assert code == 0
        aligned = tmp_path / "trajectory_aligned.csv"
        assert aligned.exists()
        times, r, v, rh, vh = read_csv(aligned)
        # after alignment the final estimated position sits on the true one
        assert np.linalg.norm(v[-1][:, 1] - vh[-1][:, 1]) < 1e-3
        assert np.abs(v[-1][:, 2:] - vh[-1][:, 2:]).max() < 1e-3

    def test_unknown_subcommand(self, capsys):
        assert run_command(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_missing_config_and_preset(self, capsys):
        assert run_command(["simulate"]) == 1

    def test_bad_config_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run_command(["simulate", str(path)]) == 1

    def test_byte_identical_csv_across_invocations(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"scenario": {"duration_s": 0.5}}))
        for sub in ("one", "two"):
            run_command(
                ["simulate", str(cfg_path), "--preset", "paper_default", "--out", str(tmp_path / sub)]
            )
        a = (tmp_path / "one" / "trajectory.csv").read_bytes()
        b = (tmp_path / "two" / "trajectory.csv").read_bytes()
        assert a == b
