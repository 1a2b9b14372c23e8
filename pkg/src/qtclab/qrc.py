"""Quantum reservoir computing on the Floquet substrate.

A waveform is injected step by step into qubit 0 of the reservoir through
the diagonal operator 0.5*(1+x)|0><0| + 0.5*(1-x)|1><1| added to whichever
branch Hamiltonian is active in that frame. After each frame the occupation
features 0.5*(<Z_l>+1) of all qubits are recorded as one row of the V
matrix. A linear filter W is fitted on a training segment by least squares
(pseudoinverse) so that V W tracks a delayed copy of the input; the loss is
the summed squared prediction error on the held-out segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .config import ExperimentConfig, derive_rng, derive_seed
from .core import FrameOperator, IsingHamiltonian, zero_state
from .floquet import FloquetSchedule, NoiseSpec, sample_noisy_h1


class DegenerateRankError(ValueError):
    """Feature matrix has rank zero; no filter can be fitted."""


@dataclass(frozen=True)
class WaveformSpec:
    """One teacher/input waveform; `seed` only matters for kind='random'."""

    kind: str
    n_steps: int
    period_steps: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("sin", "triangle", "block", "saw", "random"):
            raise ValueError(f"unknown waveform kind {self.kind!r}")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.period_steps < 2:
            raise ValueError("period_steps must be >= 2")


@dataclass
class ReservoirDataset:
    """Feature matrix V, teacher y, fitted filter W, prediction y_tilde."""

    V: np.ndarray
    y: np.ndarray
    W: Optional[np.ndarray] = None
    y_tilde: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.V.shape[0] != self.y.shape[0]:
            raise ValueError("row count of V must equal length of y")
        if self.V.size and (self.V.min() < -1e-12 or self.V.max() > 1 + 1e-12):
            raise ValueError("V entries must be occupation features in [0, 1]")


def generate_waveform(spec: WaveformSpec) -> np.ndarray:
    """Sample the waveform at integer steps; values lie in [-1, 1].

    sin/triangle/block/saw are exactly periodic with period_steps (the
    phase is reduced mod the period before evaluation). block is +1 on the
    first half of each period and -1 on the second. random is a seeded sum
    of the first five harmonics of the period with uniform amplitudes and
    phases, rescaled to peak amplitude 1.
    """
    k = np.arange(spec.n_steps)
    p = spec.period_steps
    t = (k % p) / p
    if spec.kind == "sin":
        return np.sin(2.0 * np.pi * t)
    if spec.kind == "triangle":
        return np.where(t < 0.25, 4.0 * t, np.where(t < 0.75, 2.0 - 4.0 * t, 4.0 * t - 4.0))
    if spec.kind == "block":
        return np.where(t < 0.5, 1.0, -1.0)
    if spec.kind == "saw":
        return 2.0 * t - 1.0
    rng = np.random.default_rng(spec.seed)
    amplitudes = rng.uniform(0.0, 1.0, 5)
    phases = rng.uniform(0.0, 2.0 * np.pi, 5)
    values = np.zeros(spec.n_steps)
    for m in range(5):
        values += amplitudes[m] * np.sin(2.0 * np.pi * (m + 1) * t + phases[m])
    peak = np.max(np.abs(values))
    return values / peak if peak > 0 else values


def input_operator(x: float) -> tuple[int, float, float]:
    """Projector term (qubit 0, p0, p1) encoding one input value."""
    if not np.isfinite(x) or abs(x) > 1:
        raise ValueError(f"input value must lie in [-1, 1], got {x}")
    return 0, 0.5 * (1.0 + x), 0.5 * (1.0 - x)


def feature_row(amps: np.ndarray, n_qubits: int) -> np.ndarray:
    """Occupation features 0.5*(<Z_l>+1) for every qubit; entries in [0, 1]."""
    return np.array([
        0.5 * (kernels.expect_zmask(amps, 1 << l) + 1.0) for l in range(n_qubits)])


def harvest_features(inputs, schedule: FloquetSchedule, noise: NoiseSpec,
                     mode: str, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Drive the reservoir with the input sequence and collect the V matrix.

    Starting from |0...0>, step k adds the input operator for inputs[k] to
    the branch Hamiltonian active in frame k (drive for the first
    frames_per_half_period frames of each period, H1 for the second) and
    evolves one frame dt; the feature row is recorded after the frame. In
    qtcc mode H1 coefficients are resampled at each H1 half-period start; in
    noiseless mode the template coefficients are used and `rng` is never
    touched.
    """
    if mode not in ("noiseless", "qtcc"):
        raise ValueError(f"unknown mode {mode!r}")
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 1:
        raise ValueError("inputs must be a 1-d sequence")
    if np.any(np.abs(inputs) > 1):
        raise ValueError("input values must lie in [-1, 1]")
    spec = noise if mode == "qtcc" else NoiseSpec(
        noise.base_coeffs, np.zeros_like(noise.noise_amplitudes), noise.sigma)
    stream = rng if mode == "qtcc" else None

    n = schedule.n_qubits
    frames = schedule.frames_per_half_period
    drive = schedule.drive
    h1: Optional[IsingHamiltonian] = None
    amps = zero_state(n).amplitudes
    rows = np.empty((inputs.shape[0], n))
    for k, x in enumerate(inputs):
        phase = k % (2 * frames)
        if phase < frames:
            branch = drive
        else:
            if h1 is None or phase == frames or schedule.resample_per_frame:
                h1 = sample_noisy_h1(spec, schedule.h1_template, stream)
            branch = h1
        active = branch.with_projector(*input_operator(x))
        amps = FrameOperator(active, schedule.dt).apply(amps)
        rows[k] = feature_row(amps, n)
    return rows


def fit_filter(V, y, rcond: float = 1e-10) -> np.ndarray:
    """Least-squares readout filter W, the minimum-norm minimizer of |V W - y|.

    Realized as the SVD pseudoinverse with singular values below
    rcond * sigma_max discarded.
    """
    V = np.asarray(V, dtype=float)
    y = np.asarray(y, dtype=float)
    if V.ndim != 2 or V.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: V {V.shape}, y {y.shape}")
    if rcond <= 0:
        raise ValueError("rcond must be > 0")
    W, _, rank, _ = np.linalg.lstsq(V, y, rcond=rcond)
    if rank == 0:
        raise DegenerateRankError("feature matrix has rank 0")
    return W


def predict(V, W) -> np.ndarray:
    """Readout prediction y_tilde = V W."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    if V.shape[1] != W.shape[0]:
        raise ValueError(f"shape mismatch: V {V.shape}, W {W.shape}")
    return V @ W


def qrc_loss(y_tilde, y) -> float:
    """Summed squared difference between predicted and target waves."""
    y_tilde = np.asarray(y_tilde, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_tilde.shape != y.shape:
        raise ValueError(f"length mismatch: {y_tilde.shape} vs {y.shape}")
    return float(np.sum((y_tilde - y) ** 2))


def all_to_all_ising_template(n_qubits: int) -> IsingHamiltonian:
    """Zero-coefficient all-to-all Ising structure: Z per qubit, ZZ per pair."""
    one = tuple((q, "Z", 0.0) for q in range(n_qubits))
    two = tuple((a, b, 0.0) for a in range(n_qubits) for b in range(a + 1, n_qubits))
    return IsingHamiltonian(n_qubits, one, two)


def _wave_labels(waves) -> list[str]:
    """Unique label per wave: repeated kinds get an occurrence suffix."""
    total = {kind: list(waves).count(kind) for kind in waves}
    seen: dict[str, int] = {}
    labels = []
    for kind in waves:
        occ = seen.get(kind, 0)
        seen[kind] = occ + 1
        labels.append(f"{kind}_{occ}" if total[kind] > 1 else kind)
    return labels


@dataclass
class EchoRecord:
    wave: str
    mode: str
    attempt: int
    loss: float


@dataclass
class EchoSuiteResult:
    """All per-attempt echo losses plus the data behind the summary tables."""

    config: ExperimentConfig
    records: list[EchoRecord] = field(default_factory=list)
    # (wave label, mode) -> (attempts, n_test) prediction matrix
    predictions: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    # wave label -> test-segment teacher values
    teachers: dict[str, np.ndarray] = field(default_factory=dict)

    def losses(self, mode: str) -> np.ndarray:
        return np.array([r.loss for r in self.records if r.mode == mode])

    def aggregate(self, mode: str) -> dict[str, float]:
        vals = self.losses(mode)
        return {"average": float(np.mean(vals)),
                "maximum": float(np.max(vals)),
                "minimum": float(np.min(vals))}


def run_echo_suite(config: ExperimentConfig) -> EchoSuiteResult:
    """Echo benchmark over all configured waves, attempts, and both modes.

    The teacher is the input circularly delayed by echo_delay steps; the
    filter is fitted on the first train_fraction of the rows and scored on
    the remainder. Each attempt draws a fresh reservoir (uniform [-1, 1]
    coefficients on the all-to-all Ising template); the draw is shared by
    the noiseless and qtcc passes so the modes differ only by noise.
    """
    cfg = config
    n = cfg.n_reservoir_qubits
    template = all_to_all_ising_template(n)
    n_terms = len(template.one_body) + len(template.two_body)
    labels = _wave_labels(cfg.waves)
    wave_specs = [
        WaveformSpec(kind, cfg.n_steps, cfg.period_steps,
                     seed=derive_seed(cfg.master_seed, "qrc", "wave", idx))
        for idx, kind in enumerate(cfg.waves)
    ]
    n_train = int(cfg.n_steps * cfg.train_fraction)
    result = EchoSuiteResult(config=cfg)
    pred_store: dict[tuple[str, str], list[np.ndarray]] = {}

    for attempt in range(cfg.attempts):
        base = derive_rng(cfg.master_seed, "qrc", "reservoir", attempt).uniform(-1.0, 1.0, n_terms)
        schedule = FloquetSchedule(
            n, template.with_coefficients(base), half_period=cfg.half_period,
            d=cfg.d, frames_per_half_period=cfg.frames_per_half_period,
            resample_per_frame=cfg.resample_per_frame)
        noise = NoiseSpec.from_scale(base, cfg.noise_scale)
        for idx, (label, wspec) in enumerate(zip(labels, wave_specs)):
            x = generate_waveform(wspec)
            y = np.roll(x, cfg.echo_delay)
            for mode in ("noiseless", "qtcc"):
                rng = derive_rng(cfg.master_seed, "qrc", "noise", attempt, idx)
                V = harvest_features(x, schedule, noise, mode, rng)
                data = ReservoirDataset(V=V, y=y)
                data.W = fit_filter(V[:n_train], y[:n_train], cfg.rcond)
                data.y_tilde = predict(V[n_train:], data.W)
                loss = qrc_loss(data.y_tilde, y[n_train:])
                result.records.append(EchoRecord(label, mode, attempt, loss))
                pred_store.setdefault((label, mode), []).append(data.y_tilde)
            result.teachers[label] = y[n_train:]

    for key, preds in pred_store.items():
        result.predictions[key] = np.vstack(preds)
    return result
