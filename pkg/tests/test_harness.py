"""Config parsing, seed wiring, report emission, CLI."""

import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest

from qtclab.cli import main as cli_main
from qtclab.config import (
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    derive_rng,
    derive_seed,
    parse_config,
)
from qtclab.harness import (
    emit_report,
    initial_guess,
    reaggregate_summary,
    run_case,
    sample_points,
)

FAST_FIT = ExperimentConfig(experiment="fit_qnn", mode="qtcc", attempts=1,
                            generations=1, noise_repeats=2, n_train=3, n_test=4)
FAST_ECHO = ExperimentConfig(experiment="qrc_echo", attempts=1, n_steps=30,
                             waves=("sin", "block"))


class TestParseConfig:
    def test_empty_document_is_all_defaults(self):
        assert parse_config("") == ExperimentConfig()
        assert parse_config("{}") == ExperimentConfig()

    def test_validation_names_the_field(self):
        with pytest.raises(ConfigError, match="'d'"):
            parse_config('{"d": -1}')

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="halfperiod"):
            parse_config('{"halfperiod": 2}')

    def test_parse_error_carries_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config('{\n "d": }')

    def test_round_trip_idempotent(self):
        cfg = ExperimentConfig(experiment="fit_vqkan", attempts=3, d=0.01)
        assert parse_config(cfg.to_json()) == cfg

    def test_seed_alias(self):
        assert config_from_dict({"seed": 9}).master_seed == 9
        with pytest.raises(ConfigError):
            config_from_dict({"seed": 9, "master_seed": 9})

    @pytest.mark.parametrize("field,value", [
        ("experiment", "fit_qcnn"), ("mode", "noisy"), ("attempts", 0),
        ("train_fraction", 1.5), ("waves", ["square"]), ("noise_scale", -1),
        ("echo_delay", 100), ("sigma0", 0.0),
    ])
    def test_rejected_values(self, field, value):
        with pytest.raises(ConfigError):
            config_from_dict({field: value})


class TestSeedDerivation:
    def test_streams_are_stable(self):
        a = derive_rng(5, "fit", "noise", 0).normal(size=3)
        b = derive_rng(5, "fit", "noise", 0).normal(size=3)
        assert np.array_equal(a, b)

    def test_streams_are_disjoint_across_labels(self):
        a = derive_rng(5, "fit", "noise", 0).normal(size=3)
        b = derive_rng(5, "fit", "noise", 1).normal(size=3)
        c = derive_rng(5, "qrc", "noise", 0).normal(size=3)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_label_types_distinguished(self):
        assert derive_seed(1, "5") != derive_seed(1, 5)


class TestRunCase:
    def test_minimal_fit_report(self):
        report = run_case(FAST_FIT)
        assert report.fit is not None
        [attempt] = report.fit.attempts
        assert attempt.best_trace.shape == (1,)
        assert attempt.distances.shape == (4,)
        assert attempt.test_metric == pytest.approx(attempt.distances.sum())

    def test_points_identical_across_modes(self):
        noiseless = dataclasses.replace(FAST_FIT, mode="noiseless")
        a_train, a_test = sample_points(FAST_FIT, 0)
        b_train, b_test = sample_points(noiseless, 0)
        assert np.array_equal(a_train, b_train)
        assert np.array_equal(a_test, b_test)

    def test_initial_guess_mode_independent(self):
        spec_a, x0_a = initial_guess(FAST_FIT, "qnn", 0)
        spec_b, x0_b = initial_guess(
            dataclasses.replace(FAST_FIT, mode="noiseless"), "qnn", 0)
        assert np.array_equal(x0_a, x0_b)
        assert x0_a[-2:].tolist() == [1.0, 1.0]

    def test_aggregate_matches_attempts(self):
        report = run_case(dataclasses.replace(FAST_FIT, attempts=3))
        agg = report.fit.aggregate()
        metrics = report.fit.metrics()
        assert agg["test_metric_median"] == pytest.approx(np.median(metrics))
        assert agg["test_metric_average"] == pytest.approx(np.mean(metrics))


class TestEmitReport:
    def _check_files(self, out, n_rows_attempts):
        for name in ("attempts.csv", "summary.csv", "traces.csv", "series.csv"):
            path = out / name
            assert path.exists(), name
            lines = path.read_text().strip().splitlines()
            assert "," in lines[0]  # header row present
        attempts = (out / "attempts.csv").read_text().strip().splitlines()
        assert len(attempts) - 1 == n_rows_attempts

    def test_fit_report_files(self, tmp_path):
        report = run_case(FAST_FIT)
        emit_report(report, tmp_path)
        self._check_files(tmp_path, 1)
        assert json.loads((tmp_path / "config_resolved.json").read_text()) == \
            FAST_FIT.to_dict()
        series = (tmp_path / "series.csv").read_text().strip().splitlines()
        assert len(series) - 1 == FAST_FIT.n_test
        assert (tmp_path / "params" / "attempt_0.txt").exists()
        assert (tmp_path / "predictions" / "attempt_0.csv").exists()

    def test_echo_report_files(self, tmp_path):
        report = run_case(FAST_ECHO)
        emit_report(report, tmp_path)
        self._check_files(tmp_path, 1 * 2 * 2)  # attempts x waves x modes

    def test_summary_matches_independent_reader(self, tmp_path):
        report = run_case(dataclasses.replace(FAST_FIT, attempts=2))
        emit_report(report, tmp_path)
        rows = [ln.split(",") for ln in
                (tmp_path / "attempts.csv").read_text().strip().splitlines()[1:]]
        metrics = np.array([float(r[2]) for r in rows])
        summary = dict(
            ln.split(",") for ln in
            (tmp_path / "summary.csv").read_text().strip().splitlines()[1:])
        assert float(summary["test_metric_average"]) == pytest.approx(metrics.mean())
        assert float(summary["test_metric_median"]) == pytest.approx(np.median(metrics))

    def test_reaggregation_reproduces_summary(self, tmp_path):
        report = run_case(FAST_ECHO)
        emit_report(report, tmp_path)
        original = (tmp_path / "summary.csv").read_bytes()
        (tmp_path / "summary.csv").unlink()
        reaggregate_summary(tmp_path)
        assert (tmp_path / "summary.csv").read_bytes() == original

    def test_rerun_byte_identical(self, tmp_path):
        for sub in ("a", "b"):
            emit_report(run_case(FAST_FIT), tmp_path / sub)
        for name in ("attempts.csv", "summary.csv", "traces.csv", "series.csv",
                     "config_resolved.json", "params/attempt_0.txt",
                     "predictions/attempt_0.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes(), name


class TestCli:
    def test_validate_echoes_resolved_config(self, capsys):
        assert cli_main(["validate"]) == 0
        out = capsys.readouterr().out
        assert json.loads(out) == ExperimentConfig().to_dict()

    def test_validate_rejects_bad_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"d": 2}')
        assert cli_main(["validate", "--config", str(path)]) == 2
        assert "d" in capsys.readouterr().err

    def test_run_and_report(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "experiment": "fit_qnn", "mode": "noiseless", "attempts": 1,
            "generations": 1, "n_train": 2, "n_test": 2}))
        out = tmp_path / "results"
        assert cli_main(["run", "--config", str(cfg), "--out", str(out),
                         "--seed", "3"]) == 0
        resolved = json.loads((out / "config_resolved.json").read_text())
        assert resolved["master_seed"] == 3
        assert cli_main(["report", "--out", str(out)]) == 0

    def test_cli_entry_point_runs(self):
        proc = subprocess.run([sys.executable, "-m", "qtclab.cli", "validate"],
                              capture_output=True, text=True)
        assert proc.returncode == 0

    def test_mode_override_revalidates(self, capsys):
        assert cli_main(["validate", "--seed", "12"]) == 0
        assert json.loads(capsys.readouterr().out)["master_seed"] == 12
