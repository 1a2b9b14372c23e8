"""Variational models on the Floquet substrate: QNN and VQKAN.

Both models act on 4 qubits prepared by parabolic encoding, run 2 layers of
Floquet evolution (drive half-period then Ising half-period, 10 frames
each), and read out a*<Z0 Z1 + Z2 Z3> + b with a trainable affine (a, b).

QNN: the Ising coefficients of each layer are the trainables; the input
coordinates are added to the one-body coefficients of layer 1.

VQKAN: the Ising coefficients are fixed; after each layer's Floquet
evolution the occupation features are measured and fed through learnable
spline activations that set the angles of an entangling rotation block.
The angle for ordered qubit pair (j, k) is

    phi_jk = sum_i acos(clip(E_f(x_i) + spline_jk(x_i), -1, 1))

with E_f(x) = x / (exp(-x) + 1); clip events and out-of-grid spline inputs
are counted. phi_jj drives a plain Ry on qubit j, phi_jk with j != k a
controlled-Ry (control j, target k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .core import Statevector, apply_cry, apply_ry, zero_state
from .floquet import FloquetSchedule, NoiseSpec, floquet_propagate
from .qrc import all_to_all_ising_template
from .splines import BSplineBasis

N_MODEL_QUBITS = 4
FEATURE_DOMAIN = (0.0, 0.25)


@dataclass(frozen=True)
class EncodedInput:
    """Input coordinates u in [0, 1]^4 and their mapped form x = 2u - 1."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "u", u)
        if u.shape != (N_MODEL_QUBITS,):
            raise ValueError(f"u must have length {N_MODEL_QUBITS}")
        if np.any((u < 0) | (u > 1)):
            raise ValueError("u components must lie in [0, 1]")

    @property
    def x(self) -> np.ndarray:
        return 2.0 * self.u - 1.0


@dataclass
class ClampCounters:
    """Counts of clipped acos arguments and out-of-grid spline inputs."""

    acos_clamps: int = 0
    grid_clamps: int = 0


@dataclass(frozen=True)
class ModelSpec:
    """Structure of one variational model; `kind` is 'qnn' or 'vqkan'."""

    kind: str
    n_layers: int = 2
    n_qubits: int = N_MODEL_QUBITS
    half_period: float = 1.0
    frames_per_half_period: int = 10
    d: float = 0.001
    noise_scale: float = 0.1
    noise_repeats: int = 10
    resample_per_frame: bool = False
    basis: BSplineBasis = field(
        default_factory=lambda: BSplineBasis(*FEATURE_DOMAIN))
    h1_fixed: Optional[np.ndarray] = None  # (n_layers, n_terms), vqkan only

    def __post_init__(self):
        if self.kind not in ("qnn", "vqkan"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n_qubits != N_MODEL_QUBITS:
            raise ValueError("models are fixed to 4 qubits")
        if self.kind == "vqkan":
            if self.h1_fixed is None:
                raise ValueError("vqkan needs fixed Ising coefficients h1_fixed")
            h1 = np.asarray(self.h1_fixed, dtype=float)
            object.__setattr__(self, "h1_fixed", h1)
            if h1.shape != (self.n_layers, self.n_terms):
                raise ValueError(
                    f"h1_fixed must have shape {(self.n_layers, self.n_terms)}")
        elif self.h1_fixed is not None:
            raise ValueError("h1_fixed only applies to vqkan")

    @property
    def n_terms(self) -> int:
        n = self.n_qubits
        return n + n * (n - 1) // 2

    @property
    def n_pairs(self) -> int:
        return self.n_qubits * self.n_qubits

    @property
    def dimension(self) -> int:
        """Trainable count: Ising coefficients (qnn) or spline coefficients
        (vqkan), plus the affine readout pair."""
        if self.kind == "qnn":
            return self.n_layers * self.n_terms + 2
        return self.n_layers * self.n_pairs * self.basis.n_basis + 2

    def schedule(self) -> FloquetSchedule:
        return FloquetSchedule(
            self.n_qubits, all_to_all_ising_template(self.n_qubits),
            half_period=self.half_period, d=self.d,
            frames_per_half_period=self.frames_per_half_period,
            resample_per_frame=self.resample_per_frame)

    def unflatten(self, params) -> tuple[np.ndarray, np.ndarray, float, float]:
        """Split a flat parameter vector into (ising coeffs, spline coeffs, a, b)."""
        params = np.asarray(params, dtype=float)
        if params.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} parameters, got {params.shape}")
        a, b = params[-2], params[-1]
        if self.kind == "qnn":
            h1 = params[:-2].reshape(self.n_layers, self.n_terms)
            splines = np.zeros((self.n_layers, self.n_qubits, self.n_qubits,
                                self.basis.n_basis))
            return h1, splines, float(a), float(b)
        splines = params[:-2].reshape(self.n_layers, self.n_qubits, self.n_qubits,
                                      self.basis.n_basis)
        return self.h1_fixed, splines, float(a), float(b)


def parabolic_encode(u) -> Statevector:
    """Prepare each qubit j as Ry(2 acos(sqrt(u_j))) |0>, so that the
    occupation feature 0.5*(<Z_j>+1) returns u_j exactly."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("encoding inputs must lie in [0, 1]")
    state = zero_state(u.shape[0])
    for j, value in enumerate(u):
        state = apply_ry(state, j, 2.0 * math.acos(math.sqrt(value)))
    return state


def feature_readout(state: Statevector) -> np.ndarray:
    """Occupation features 0.5*(<Z_i>+1), one per qubit, each in [0, 1]."""
    if state.n_qubits != N_MODEL_QUBITS:
        raise ValueError(f"expected a {N_MODEL_QUBITS}-qubit state")
    return np.array([
        0.5 * (kernels.expect_zmask(state.amplitudes, 1 << i) + 1.0)
        for i in range(state.n_qubits)])


def target_function(u) -> float:
    """exp(sin(x0^2 + x1^2) + sin(x2^2 + x3^2)) with x = 2u - 1."""
    u = np.asarray(u, dtype=float)
    if u.shape != (4,) or np.any((u < 0) | (u > 1)):
        raise ValueError("u must be a length-4 vector in [0, 1]^4")
    x = 2.0 * u - 1.0
    return float(np.exp(np.sin(x[0] ** 2 + x[1] ** 2) + np.sin(x[2] ** 2 + x[3] ** 2)))


def fermi_dirac(x):
    """x / (exp(-x) + 1), the swish-shaped feature transform."""
    x = np.asarray(x, dtype=float)
    out = x / (np.exp(-x) + 1.0)
    return float(out) if out.ndim == 0 else out


def vqkan_angle(x_inputs, coefficients, basis: BSplineBasis,
                counters: Optional[ClampCounters] = None) -> float:
    """Rotation angle sum_i acos(clip(E_f(x_i) + spline(x_i), -1, 1)).

    Spline inputs are clamped into the grid domain; both grid clamps and
    acos-argument clips are tallied on `counters` when given.
    """
    x = np.asarray(x_inputs, dtype=float)
    spline_vals = basis.evaluate(np.asarray(coefficients, dtype=float), x)
    args = fermi_dirac(x) + spline_vals
    clipped = np.clip(args, -1.0, 1.0)
    if counters is not None:
        counters.grid_clamps += basis.clamp_count(x)
        counters.acos_clamps += int(np.sum(args != clipped))
    return float(np.sum(np.arccos(clipped)))


def vqkan_angle_block(features, splines_layer, basis: BSplineBasis,
                      counters: Optional[ClampCounters] = None) -> np.ndarray:
    """All (j, k) angles of one layer at once; equals per-pair vqkan_angle.

    The feature vector is shared by every pair, so the spline design matrix
    is evaluated once and contracted against the whole coefficient block.
    """
    x = np.asarray(features, dtype=float)
    design = basis.design_matrix(x)  # (n_features, n_basis)
    args = fermi_dirac(x)[None, None, :] + splines_layer @ design.T
    clipped = np.clip(args, -1.0, 1.0)
    if counters is not None:
        # per-pair semantics: each activation evaluates every feature
        counters.grid_clamps += splines_layer.shape[0] * splines_layer.shape[1] \
            * basis.clamp_count(x)
        counters.acos_clamps += int(np.sum(args != clipped))
    return np.sum(np.arccos(clipped), axis=-1)


def _entangling_block(state: Statevector, splines_layer, basis, features,
                      counters) -> Statevector:
    """Ordered-pair rotation block: Ry(phi_jj) on the diagonal, controlled-
    Ry(phi_jk) (control j, target k) off it, in row-major (j, k) order."""
    angles = vqkan_angle_block(features, splines_layer, basis, counters)
    for j in range(state.n_qubits):
        for k in range(state.n_qubits):
            if j == k:
                state = apply_ry(state, j, angles[j, k])
            else:
                state = apply_cry(state, j, k, angles[j, k])
    return state


_Z0Z1_MASK = 0b0011
_Z2Z3_MASK = 0b1100


def readout_energy(state: Statevector) -> float:
    """<Z0 Z1 + Z2 Z3>, always in [-2, 2]."""
    return (kernels.expect_zmask(state.amplitudes, _Z0Z1_MASK)
            + kernels.expect_zmask(state.amplitudes, _Z2Z3_MASK))


def model_forward(spec: ModelSpec, u, params, mode: str,
                  rng: Optional[np.random.Generator] = None,
                  counters: Optional[ClampCounters] = None) -> float:
    """One model evaluation: encoded input -> layered evolution -> prediction.

    In qtcc mode every Ising half-period receives a fresh Gaussian
    coefficient perturbation drawn from `rng`; noiseless mode never touches
    the stream.
    """
    if mode not in ("noiseless", "qtcc"):
        raise ValueError(f"unknown mode {mode!r}")
    u = np.asarray(u, dtype=float)
    h1_layers, splines, a, b = spec.unflatten(params)
    schedule = spec.schedule()
    scale = spec.noise_scale if mode == "qtcc" else 0.0
    state = parabolic_encode(u)
    for layer in range(spec.n_layers):
        coeffs = np.array(h1_layers[layer], dtype=float)
        if spec.kind == "qnn" and layer == 0:
            coeffs[:spec.n_qubits] += u
        noise = NoiseSpec.from_scale(coeffs, scale)
        state = floquet_propagate(state, schedule, noise, 2, rng)
        if spec.kind == "vqkan":
            features = feature_readout(state)
            state = _entangling_block(state, splines[layer], spec.basis,
                                      features, counters)
    return a * readout_energy(state) + b


def training_loss(spec: ModelSpec, params, samples, mode: str,
                  rng: Optional[np.random.Generator] = None,
                  repeats: Optional[int] = None,
                  counters: Optional[ClampCounters] = None) -> float:
    """Sum over samples of the mean over repeats of the squared error.

    Defaults: one evaluation per point in noiseless mode, `noise_repeats`
    in qtcc mode (the landscape is stochastic there, so each point's loss
    is averaged over fresh noise realizations).
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("empty sample set")
    if repeats is None:
        repeats = spec.noise_repeats if mode == "qtcc" else 1
    total = 0.0
    for u in samples:
        target = target_function(u)
        errors = [
            (model_forward(spec, u, params, mode, rng, counters) - target) ** 2
            for _ in range(repeats)
        ]
        total += float(np.mean(errors))
    return total


def test_distances(spec: ModelSpec, params, test_points, mode: str,
                   rng: Optional[np.random.Generator] = None,
                   repeats: Optional[int] = None,
                   counters: Optional[ClampCounters] = None
                   ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(predictions, targets, |prediction - target|) over the test points.

    In qtcc mode each point's prediction is the mean over `repeats` noise
    realizations before the distance is taken.
    """
    points = np.atleast_2d(np.asarray(test_points, dtype=float))
    if repeats is None:
        repeats = spec.noise_repeats if mode == "qtcc" else 1
    preds = np.empty(points.shape[0])
    targets = np.empty(points.shape[0])
    for i, u in enumerate(points):
        values = [model_forward(spec, u, params, mode, rng, counters)
                  for _ in range(repeats)]
        preds[i] = float(np.mean(values))
        targets[i] = target_function(u)
    return preds, targets, np.abs(preds - targets)


def test_metric(spec: ModelSpec, params, test_points, mode: str,
                rng: Optional[np.random.Generator] = None,
                repeats: Optional[int] = None,
                counters: Optional[ClampCounters] = None) -> float:
    """Sum of absolute distances between predictions and targets."""
    _, _, dist = test_distances(spec, params, test_points, mode, rng, repeats, counters)
    return float(np.sum(dist))


def parameter_labels(spec: ModelSpec) -> list[str]:
    """Flat names matching the parameter vector layout."""
    labels = []
    template = all_to_all_ising_template(spec.n_qubits)
    if spec.kind == "qnn":
        for layer in range(spec.n_layers):
            for q, _, _ in template.one_body:
                labels.append(f"layer{layer}_one_body_q{q}")
            for qa, qb, _ in template.two_body:
                labels.append(f"layer{layer}_two_body_q{qa}q{qb}")
    else:
        for layer in range(spec.n_layers):
            for j in range(spec.n_qubits):
                for k in range(spec.n_qubits):
                    for l in range(spec.basis.n_basis):
                        labels.append(f"layer{layer}_spline_j{j}k{k}_c{l}")
    labels += ["readout_scale", "readout_offset"]
    return labels


def format_params(spec: ModelSpec, params) -> str:
    """Line-oriented snapshot: one `name value` pair per line."""
    params = np.asarray(params, dtype=float)
    labels = parameter_labels(spec)
    if params.shape != (len(labels),):
        raise ValueError(f"expected {len(labels)} parameters, got {params.shape}")
    return "".join(f"{name} {value!r}\n" for name, value in zip(labels, params.tolist()))


def predictions_table(points, predictions, targets) -> str:
    """Delimited table: point index, u coordinates, prediction, target, distance."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    lines = ["point,u0,u1,u2,u3,prediction,target,abs_distance"]
    for i, (u, p, t) in enumerate(zip(points, predictions, targets)):
        coords = ",".join(repr(float(c)) for c in u)
        lines.append(
            f"{i},{coords},{float(p)!r},{float(t)!r},{abs(float(p) - float(t))!r}")
    return "\n".join(lines) + "\n"
