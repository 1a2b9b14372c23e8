"""Floquet time-crystal substrate: alternating drive / Ising half-periods.

The schedule alternates two Hamiltonians over each period 2T: a transverse
drive 0.5*(1-d)*X on every qubit for the first half-period, then an Ising
Hamiltonian H1 for the second half. H1 is where controlled noise enters:
each of its coefficients is perturbed as theta0 + theta_r * g with g drawn
from a zero-mean Gaussian of standard deviation sigma (default 1/3), freshly
sampled once per H1 half-period (or per frame when requested). The drive
half-period is always noiseless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from .core import FrameOperator, IsingHamiltonian, Statevector, frame_operator

GAUSS_SIGMA = 1.0 / 3.0


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian coefficient-noise law theta_i = theta0_i + theta_r_i * g.

    base_coeffs and noise_amplitudes run over the Hamiltonian terms in
    canonical order (one-body terms first, then two-body). All noise
    amplitudes zero means noiseless mode: sampling then returns the base
    coefficients exactly and draws nothing from the stream.
    """

    base_coeffs: np.ndarray
    noise_amplitudes: np.ndarray
    sigma: float = GAUSS_SIGMA

    def __post_init__(self):
        object.__setattr__(self, "base_coeffs",
                           np.asarray(self.base_coeffs, dtype=float))
        object.__setattr__(self, "noise_amplitudes",
                           np.asarray(self.noise_amplitudes, dtype=float))
        if self.base_coeffs.shape != self.noise_amplitudes.shape:
            raise ValueError("base_coeffs and noise_amplitudes must have equal length")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @classmethod
    def from_scale(cls, base_coeffs, noise_scale: float,
                   sigma: float = GAUSS_SIGMA) -> "NoiseSpec":
        """Uniform noise amplitude `noise_scale` on every term."""
        base = np.asarray(base_coeffs, dtype=float)
        return cls(base, np.full(base.shape, float(noise_scale)), sigma)

    @property
    def is_noiseless(self) -> bool:
        return bool(np.all(self.noise_amplitudes == 0.0))


@dataclass(frozen=True)
class FloquetSchedule:
    """Two-branch periodic schedule: drive on [0, T], H1 on (T, 2T].

    Each half-period is integrated in `frames_per_half_period` exact steps
    of dt = T / frames. `h1_template` fixes the term structure of H1; its
    coefficients are replaced per half-period by a NoiseSpec sample.
    """

    n_qubits: int
    h1_template: IsingHamiltonian
    half_period: float = 1.0
    d: float = 0.001
    frames_per_half_period: int = 10
    resample_per_frame: bool = False

    def __post_init__(self):
        if self.half_period <= 0:
            raise ValueError("half_period must be positive")
        if self.frames_per_half_period < 1:
            raise ValueError("frames_per_half_period must be >= 1")
        if self.h1_template.n_qubits != self.n_qubits:
            raise ValueError("h1_template qubit count mismatch")

    @property
    def dt(self) -> float:
        return self.half_period / self.frames_per_half_period

    @property
    def drive(self) -> IsingHamiltonian:
        return drive_hamiltonian(self.n_qubits, self.d)


def drive_hamiltonian(n_qubits: int, d: float) -> IsingHamiltonian:
    """Transverse drive 0.5*(1-d) X on every qubit (d = 1 turns it off)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if not 0 <= d <= 1:
        raise ValueError(f"drive detuning d must be in [0, 1], got {d}")
    coeff = 0.5 * (1.0 - d)
    return IsingHamiltonian(
        n_qubits, one_body=tuple((q, "X", coeff) for q in range(n_qubits)))


def sample_noisy_h1(spec: NoiseSpec, template: IsingHamiltonian,
                    rng: Optional[np.random.Generator]) -> IsingHamiltonian:
    """One noisy realization of H1; noiseless specs return the template coefficients.

    Noise applies to the one-body and two-body coefficients in term order;
    projector terms (input injection bookkeeping) pass through untouched.
    """
    n_terms = len(template.one_body) + len(template.two_body)
    if spec.base_coeffs.shape[0] != n_terms:
        raise ValueError(
            f"spec covers {spec.base_coeffs.shape[0]} terms, template has {n_terms}")
    if spec.is_noiseless:
        return template.with_coefficients(spec.base_coeffs)
    if rng is None:
        raise ValueError("noisy sampling requires an rng stream")
    draws = rng.normal(0.0, spec.sigma, size=n_terms)
    return template.with_coefficients(spec.base_coeffs + spec.noise_amplitudes * draws)


def frame_sequence(schedule: FloquetSchedule, spec: NoiseSpec, n_half_periods: int,
                   rng: Optional[np.random.Generator]) -> Iterator[IsingHamiltonian]:
    """Active Hamiltonian for each frame, in order, across n_half_periods.

    Half-periods alternate drive, H1, drive, H1, ... starting from the
    drive. H1 noise is sampled at the first frame of each H1 half-period
    and held for the rest of that half, unless `resample_per_frame` asks
    for an independent draw every frame.
    """
    if n_half_periods < 1:
        raise ValueError("n_half_periods must be >= 1")
    drive = schedule.drive
    for half in range(n_half_periods):
        if half % 2 == 0:
            for _ in range(schedule.frames_per_half_period):
                yield drive
        else:
            h1 = sample_noisy_h1(spec, schedule.h1_template, rng)
            for frame in range(schedule.frames_per_half_period):
                if frame > 0 and schedule.resample_per_frame:
                    h1 = sample_noisy_h1(spec, schedule.h1_template, rng)
                yield h1


Observer = Callable[[int, Statevector, IsingHamiltonian], None]


def floquet_propagate(state: Statevector, schedule: FloquetSchedule, spec: NoiseSpec,
                      n_half_periods: int, rng: Optional[np.random.Generator] = None,
                      observer: Optional[Observer] = None) -> Statevector:
    """Propagate through n_half_periods of the alternating schedule.

    The observer, when given, fires after every frame with the running
    frame index, the current state, and the Hamiltonian that generated the
    frame (the latter makes the noise-resampling cadence observable).
    Without an observer the frames of a half-period are applied as one
    exact power of the frame propagator (same noise draws, same result).
    """
    amps = state.amplitudes
    dt = schedule.dt
    frames = schedule.frames_per_half_period

    if observer is None and not schedule.resample_per_frame:
        for half in range(n_half_periods):
            if half % 2 == 0:
                h = schedule.drive
            else:
                h = sample_noisy_h1(spec, schedule.h1_template, rng)
            # dense propagators (the drive) are worth memoizing across
            # calls; diagonal ones are cheaper to rebuild than to hash
            op = frame_operator(h, dt, cache=not h.is_diagonal)
            amps = op.apply_power(amps, frames)
        return Statevector(state.n_qubits, amps)

    frame_index = 0
    current_h: Optional[IsingHamiltonian] = None
    op: Optional[FrameOperator] = None
    for h in frame_sequence(schedule, spec, n_half_periods, rng):
        if h is not current_h:
            op = frame_operator(h, dt, cache=not h.is_diagonal)
            current_h = h
        amps = op.apply(amps)
        if observer is not None:
            observer(frame_index, Statevector(state.n_qubits, amps), h)
        frame_index += 1
    return Statevector(state.n_qubits, amps)
