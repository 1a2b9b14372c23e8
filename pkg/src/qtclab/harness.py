"""Experiment orchestration and report emission.

`run_case` executes one configured experiment (the echo suite or one of the
fitting cases) deterministically under the master seed; `emit_report`
writes the four delimited report files plus the resolved-config echo:

    attempts.csv  per-attempt records
    summary.csv   aggregate statistics, recomputable from attempts.csv
    traces.csv    per-generation optimizer fitness traces (empty for qrc)
    series.csv    per-test-point / per-time-step series
    config_resolved.json  the fully resolved configuration
    meta.txt      wall clock and backend info (not part of the numeric output)

Fit cases additionally write per-attempt parameter snapshots and prediction
tables under params/ and predictions/. All files are written atomically
(write to a temp name, then rename) with '.' decimals and a header row.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .cmaes import optimize
from .config import ExperimentConfig, derive_rng, derive_seed
from .qml import (
    BSplineBasis,
    ClampCounters,
    ModelSpec,
    format_params,
    predictions_table,
    test_distances,
    training_loss,
)
from .qrc import EchoSuiteResult, run_echo_suite

INPUT_DOMAIN = (0.0, 0.25)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


@dataclass
class FitAttempt:
    attempt: int
    train_loss: float
    test_metric: float
    acos_clamps: int
    grid_clamps: int
    best_trace: np.ndarray
    mean_trace: np.ndarray
    test_points: np.ndarray
    predictions: np.ndarray
    targets: np.ndarray
    distances: np.ndarray
    params: np.ndarray
    spec: ModelSpec


@dataclass
class FitCaseResult:
    kind: str
    mode: str
    attempts: list[FitAttempt] = field(default_factory=list)

    def metrics(self) -> np.ndarray:
        return np.array([a.test_metric for a in self.attempts])

    def aggregate(self) -> dict[str, float]:
        metrics = self.metrics()
        train = np.array([a.train_loss for a in self.attempts])
        return {
            "test_metric_median": float(np.median(metrics)),
            "test_metric_average": float(np.mean(metrics)),
            "test_metric_maximum": float(np.max(metrics)),
            "test_metric_minimum": float(np.min(metrics)),
            "train_loss_average": float(np.mean(train)),
        }


@dataclass
class RunReport:
    config: ExperimentConfig
    wall_seconds: float
    echo: Optional[EchoSuiteResult] = None
    fit: Optional[FitCaseResult] = None


def build_model_spec(config: ExperimentConfig, kind: str,
                     h1_fixed: Optional[np.ndarray] = None) -> ModelSpec:
    basis = BSplineBasis(*INPUT_DOMAIN, n_cells=config.spline_grid_cells,
                         degree=config.spline_degree)
    return ModelSpec(
        kind=kind, n_layers=config.n_layers,
        half_period=config.half_period,
        frames_per_half_period=config.frames_per_half_period, d=config.d,
        noise_scale=config.noise_scale, noise_repeats=config.noise_repeats,
        resample_per_frame=config.resample_per_frame, basis=basis,
        h1_fixed=h1_fixed)


def initial_guess(config: ExperimentConfig, kind: str, attempt: int
                  ) -> tuple[ModelSpec, np.ndarray]:
    """Per-attempt model spec and CMA-ES start vector.

    QNN starts from small random Ising coefficients; VQKAN starts from zero
    spline coefficients (pure acos(E_f) activations) around a fixed random
    Ising draw. The affine readout starts at (1, 1) for both.
    """
    rng = derive_rng(config.master_seed, "fit", "init", kind, attempt)
    if kind == "qnn":
        spec = build_model_spec(config, "qnn")
        coeffs = rng.uniform(-0.1, 0.1, config.n_layers * spec.n_terms)
        x0 = np.concatenate([coeffs, [1.0, 1.0]])
    else:
        n_terms = 4 + 6  # Z per qubit + ZZ per pair on the 4-qubit register
        h1_fixed = rng.uniform(-0.1, 0.1, (config.n_layers, n_terms))
        spec = build_model_spec(config, "vqkan", h1_fixed=h1_fixed)
        x0 = np.concatenate([
            np.zeros(config.n_layers * spec.n_pairs * spec.basis.n_basis),
            [1.0, 1.0]])
    return spec, x0


def sample_points(config: ExperimentConfig, attempt: int
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Train/test inputs for one attempt, identical across modes and models."""
    lo, hi = INPUT_DOMAIN
    train = derive_rng(config.master_seed, "fit", "train_points", attempt
                       ).uniform(lo, hi, (config.n_train, 4))
    test = derive_rng(config.master_seed, "fit", "test_points", attempt
                      ).uniform(lo, hi, (config.n_test, 4))
    return train, test


def _run_fit_case(config: ExperimentConfig) -> FitCaseResult:
    kind = "qnn" if config.experiment == "fit_qnn" else "vqkan"
    mode = config.mode
    result = FitCaseResult(kind=kind, mode=mode)
    for attempt in range(config.attempts):
        spec, x0 = initial_guess(config, kind, attempt)
        train_u, test_u = sample_points(config, attempt)
        counters = ClampCounters()
        noise_rng = derive_rng(config.master_seed, "fit", "noise", kind, attempt)

        def loss(x):
            return training_loss(spec, x, train_u, mode, noise_rng,
                                 counters=counters)

        opt = optimize(loss, x0, config.sigma0, config.generations,
                       seed=derive_seed(config.master_seed, "fit", "cma", kind, attempt))
        test_rng = derive_rng(config.master_seed, "fit", "noise_test", kind, attempt)
        preds, targets, dists = test_distances(
            spec, opt.best_params, test_u, mode, test_rng, counters=counters)
        result.attempts.append(FitAttempt(
            attempt=attempt, train_loss=float(opt.best_fitness),
            test_metric=float(np.sum(dists)),
            acos_clamps=counters.acos_clamps, grid_clamps=counters.grid_clamps,
            best_trace=opt.best_trace, mean_trace=opt.mean_trace,
            test_points=test_u, predictions=preds, targets=targets,
            distances=dists, params=opt.best_params, spec=spec))
    return result


def run_case(config: ExperimentConfig) -> RunReport:
    """Execute the configured experiment; deterministic under master_seed."""
    start = time.perf_counter()
    if config.experiment == "qrc_echo":
        echo = run_echo_suite(config)
        return RunReport(config, time.perf_counter() - start, echo=echo)
    fit = _run_fit_case(config)
    return RunReport(config, time.perf_counter() - start, fit=fit)


ECHO_ATTEMPT_HEADER = ["wave_kind", "mode", "attempt", "loss"]
FIT_ATTEMPT_HEADER = ["attempt", "train_loss", "test_metric", "acos_clamps",
                      "grid_clamps"]
TRACE_HEADER = ["attempt", "generation", "best_fitness", "mean_fitness"]
ECHO_SERIES_HEADER = ["wave_kind", "mode", "step", "teacher",
                      "prediction_mean", "prediction_min", "prediction_max"]
FIT_SERIES_HEADER = ["point_index", "abs_distance_average", "abs_distance_median"]


def echo_summary_rows(losses_by_mode: dict[str, np.ndarray]) -> list[list]:
    rows = []
    for stat, fn in (("average", np.mean), ("maximum", np.max), ("minimum", np.min)):
        rows.append([stat,
                     float(fn(losses_by_mode["noiseless"])),
                     float(fn(losses_by_mode["qtcc"]))])
    return rows


def fit_summary_rows(train_losses: np.ndarray, metrics: np.ndarray) -> list[list]:
    return [
        ["test_metric_median", float(np.median(metrics))],
        ["test_metric_average", float(np.mean(metrics))],
        ["test_metric_maximum", float(np.max(metrics))],
        ["test_metric_minimum", float(np.min(metrics))],
        ["train_loss_average", float(np.mean(train_losses))],
    ]


def emit_report(report: RunReport, out_dir) -> list[Path]:
    """Write all report files into `out_dir`; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out / name
        _write_atomic(path, text)
        written.append(path)

    if report.echo is not None:
        echo = report.echo
        attempts = [[r.wave, r.mode, r.attempt, r.loss] for r in echo.records]
        emit("attempts.csv", _csv(ECHO_ATTEMPT_HEADER, attempts))
        losses = {m: echo.losses(m) for m in ("noiseless", "qtcc")}
        emit("summary.csv", _csv(["statistic", "noiseless", "qtcc"],
                                 echo_summary_rows(losses)))
        emit("traces.csv", _csv(TRACE_HEADER, []))
        n_train = int(report.config.n_steps * report.config.train_fraction)
        series = []
        for (label, mode), preds in sorted(echo.predictions.items()):
            teacher = echo.teachers[label]
            for i in range(preds.shape[1]):
                series.append([label, mode, n_train + i, teacher[i],
                               float(np.mean(preds[:, i])),
                               float(np.min(preds[:, i])),
                               float(np.max(preds[:, i]))])
        emit("series.csv", _csv(ECHO_SERIES_HEADER, series))
    else:
        fit = report.fit
        attempts = [[a.attempt, a.train_loss, a.test_metric, a.acos_clamps,
                     a.grid_clamps] for a in fit.attempts]
        emit("attempts.csv", _csv(FIT_ATTEMPT_HEADER, attempts))
        emit("summary.csv", _csv(
            ["statistic", "value"],
            fit_summary_rows(np.array([a.train_loss for a in fit.attempts]),
                             fit.metrics())))
        traces = []
        for a in fit.attempts:
            for gen, (best, mean) in enumerate(zip(a.best_trace, a.mean_trace)):
                traces.append([a.attempt, gen, float(best), float(mean)])
        emit("traces.csv", _csv(TRACE_HEADER, traces))
        dist_matrix = np.vstack([a.distances for a in fit.attempts])
        series = [[i, float(np.mean(dist_matrix[:, i])),
                   float(np.median(dist_matrix[:, i]))]
                  for i in range(dist_matrix.shape[1])]
        emit("series.csv", _csv(FIT_SERIES_HEADER, series))

        (out / "params").mkdir(exist_ok=True)
        (out / "predictions").mkdir(exist_ok=True)
        for a in fit.attempts:
            path = out / "params" / f"attempt_{a.attempt}.txt"
            _write_atomic(path, format_params(a.spec, a.params))
            written.append(path)
            path = out / "predictions" / f"attempt_{a.attempt}.csv"
            _write_atomic(path, predictions_table(a.test_points, a.predictions,
                                                  a.targets))
            written.append(path)

    emit("config_resolved.json", report.config.to_json())
    _write_atomic(out / "meta.txt",
                  f"wall_seconds {report.wall_seconds!r}\n"
                  f"kernel_backend {kernels.backend_name()}\n")
    written.append(out / "meta.txt")
    return written


def reaggregate_summary(out_dir) -> Path:
    """Rebuild summary.csv from the per-attempt records already on disk."""
    out = Path(out_dir)
    attempts_path = out / "attempts.csv"
    lines = attempts_path.read_text(encoding="utf-8").strip().splitlines()
    header, rows = lines[0].split(","), [ln.split(",") for ln in lines[1:]]
    if header == ECHO_ATTEMPT_HEADER:
        losses: dict[str, list[float]] = {"noiseless": [], "qtcc": []}
        for _, mode, _, loss in rows:
            losses[mode].append(float(loss))
        by_mode = {m: np.array(v) for m, v in losses.items()}
        text = _csv(["statistic", "noiseless", "qtcc"], echo_summary_rows(by_mode))
    elif header == FIT_ATTEMPT_HEADER:
        train = np.array([float(r[1]) for r in rows])
        metrics = np.array([float(r[2]) for r in rows])
        text = _csv(["statistic", "value"], fit_summary_rows(train, metrics))
    else:
        raise ValueError(f"unrecognized attempts.csv header: {header}")
    path = out / "summary.csv"
    _write_atomic(path, text)
    return path
