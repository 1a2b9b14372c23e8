"""Floquet schedule: drive term, noise law, propagation cadence."""

import math

import numpy as np
import pytest

from qtclab.core import IsingHamiltonian, Statevector, evolve, zero_state
from qtclab.floquet import (
    FloquetSchedule,
    NoiseSpec,
    drive_hamiltonian,
    floquet_propagate,
    frame_sequence,
    sample_noisy_h1,
)
from qtclab.qrc import all_to_all_ising_template


class TestDriveHamiltonian:
    def test_single_qubit_no_detuning(self):
        h = drive_hamiltonian(1, 0.0)
        assert h.one_body == ((0, "X", 0.5),)
        assert h.two_body == ()

    def test_protocol_detuning(self):
        h = drive_hamiltonian(4, 0.001)
        assert len(h.one_body) == 4
        for _, axis, coeff in h.one_body:
            assert axis == "X"
            assert coeff == pytest.approx(0.4995)

    def test_full_detuning_boundary(self):
        h = drive_hamiltonian(2, 1.0)
        assert all(c == 0.0 for _, _, c in h.one_body)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            drive_hamiltonian(0, 0.1)
        with pytest.raises(ValueError):
            drive_hamiltonian(2, -0.1)
        with pytest.raises(ValueError):
            drive_hamiltonian(2, 1.5)


class TestNoiseSpec:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            NoiseSpec(np.zeros(3), np.zeros(2))

    def test_noiseless_iff_all_amplitudes_zero(self):
        assert NoiseSpec(np.ones(3), np.zeros(3)).is_noiseless
        assert not NoiseSpec(np.ones(3), np.array([0.0, 0.1, 0.0])).is_noiseless

    def test_default_sigma_is_one_third(self):
        assert NoiseSpec(np.ones(1), np.ones(1)).sigma == pytest.approx(1 / 3)


class TestSampleNoisyH1:
    def test_noiseless_returns_template_exactly(self):
        template = all_to_all_ising_template(3)
        base = np.arange(1.0, 1.0 + len(template.coefficients()))
        spec = NoiseSpec(base, np.zeros_like(base))
        out = sample_noisy_h1(spec, template, None)
        assert np.array_equal(out.coefficients(), base)

    def test_noiseless_never_draws(self):
        template = all_to_all_ising_template(2)
        base = np.ones(3)
        rng = np.random.default_rng(0)
        before = rng.bit_generator.state
        sample_noisy_h1(NoiseSpec(base, np.zeros(3)), template, rng)
        assert rng.bit_generator.state == before

    def test_statistics_match_the_stated_law(self):
        # statistical oracle: theta = 1 + 1 * N(0, 1/3) over 1e5 draws
        template = IsingHamiltonian(1, one_body=((0, "Z", 0.0),))
        spec = NoiseSpec(np.array([1.0]), np.array([1.0]))
        rng = np.random.default_rng(2024)
        draws = np.array([
            sample_noisy_h1(spec, template, rng).coefficients()[0]
            for _ in range(100_000)
        ])
        sigma = 1 / 3
        assert abs(draws.mean() - 1.0) < 4 * sigma / math.sqrt(draws.size)
        assert abs(draws.std(ddof=1) - sigma) < 0.05 * sigma

    def test_length_mismatch(self):
        template = all_to_all_ising_template(2)
        with pytest.raises(ValueError):
            sample_noisy_h1(NoiseSpec(np.ones(5), np.ones(5)), template,
                            np.random.default_rng(0))


def _schedule(n=1, T=1.0, frames=10, coeffs=(0.3,), template=None, **kw):
    if template is None:
        template = IsingHamiltonian(n, one_body=tuple(
            (q, "Z", c) for q, c in enumerate(coeffs)))
    return FloquetSchedule(n, template, half_period=T,
                           frames_per_half_period=frames, **kw)


class TestFloquetPropagate:
    def test_observer_fires_once_per_frame(self):
        sched = _schedule(frames=7)
        spec = NoiseSpec(np.array([0.3]), np.zeros(1))
        count = []
        floquet_propagate(zero_state(1), sched, spec, 2,
                          observer=lambda i, s, h: count.append(i))
        assert count == list(range(2 * 7))

    def test_vanishing_half_period_is_identity(self):
        sched = _schedule(T=1e-9)
        spec = NoiseSpec(np.array([0.3]), np.zeros(1))
        amps = np.array([0.6, 0.8j])
        out = floquet_propagate(Statevector(1, amps), sched, spec, 4)
        assert np.max(np.abs(out.amplitudes - amps)) < 1e-8

    def test_single_qubit_closed_form_period(self):
        # |+> is an X eigenstate (drive half only adds phase); H1 = Z for
        # T = pi is exp(-i pi Z) = -identity: the state returns up to phase
        sched = _schedule(T=math.pi, frames=1, coeffs=(1.0,))
        spec = NoiseSpec(np.array([1.0]), np.zeros(1))
        plus = Statevector(1, np.array([1.0, 1.0]) / math.sqrt(2))
        seen = []
        out = floquet_propagate(plus, sched, spec, 2,
                                observer=lambda i, s, h: seen.append(s))
        # paired closed-form check after the H1 half-period
        z = np.array([[1, 0], [0, -1]], dtype=complex)
        import scipy.linalg
        want = scipy.linalg.expm(-1j * math.pi * z) @ seen[0].amplitudes
        assert np.max(np.abs(out.amplitudes - want)) < 1e-10
        overlap = abs(np.vdot(plus.amplitudes, out.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-10)

    def test_noiseless_equals_hand_composed_evolution(self):
        n = 3
        template = all_to_all_ising_template(n)
        base = np.linspace(-1, 1, len(template.coefficients()))
        sched = FloquetSchedule(n, template, half_period=0.8, d=0.01,
                                frames_per_half_period=4)
        spec = NoiseSpec(base, np.zeros_like(base))
        rng = np.random.default_rng(0)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        state = Statevector(n, amps / np.linalg.norm(amps))

        got = floquet_propagate(state, sched, spec, 4)
        want = state
        h1 = template.with_coefficients(base)
        for half in range(4):
            h = sched.drive if half % 2 == 0 else h1
            for _ in range(4):
                want = evolve(want, h, sched.dt)
        assert np.max(np.abs(got.amplitudes - want.amplitudes)) < 1e-10

    def test_determinism_with_seeded_noise(self):
        sched = _schedule(n=2, template=all_to_all_ising_template(2))
        spec = NoiseSpec(np.array([0.5, -0.2, 0.8]), np.full(3, 0.1))
        outs = []
        for _ in range(2):
            rng = np.random.default_rng(77)
            outs.append(floquet_propagate(zero_state(2), sched, spec, 6, rng))
        assert np.array_equal(outs[0].amplitudes, outs[1].amplitudes)

    def test_noise_resampled_once_per_h1_half_period(self):
        sched = _schedule(n=1, frames=5)
        spec = NoiseSpec(np.array([0.3]), np.array([0.2]))
        seen = []
        floquet_propagate(zero_state(1), sched, spec, 4,
                          np.random.default_rng(1),
                          observer=lambda i, s, h: seen.append(h))
        drive = sched.drive
        halves = [seen[k * 5:(k + 1) * 5] for k in range(4)]
        for k, frames in enumerate(halves):
            if k % 2 == 0:
                assert all(h == drive for h in frames)
            else:
                # one draw shared by all frames of the half-period
                assert len({h.coefficients()[0] for h in frames}) == 1
        assert halves[1][0].coefficients()[0] != halves[3][0].coefficients()[0]

    def test_resample_per_frame_flag(self):
        sched = _schedule(n=1, frames=5, resample_per_frame=True)
        spec = NoiseSpec(np.array([0.3]), np.array([0.2]))
        seen = []
        floquet_propagate(zero_state(1), sched, spec, 2,
                          np.random.default_rng(1),
                          observer=lambda i, s, h: seen.append(h))
        h1_frames = seen[5:]
        assert len({h.coefficients()[0] for h in h1_frames}) == 5

    def test_fast_path_matches_frame_stepping(self):
        # observer-free propagation collapses each half-period into one
        # operator power; results must match the per-frame path
        n = 3
        template = all_to_all_ising_template(n)
        base = np.linspace(-1, 1, len(template.coefficients()))
        sched = FloquetSchedule(n, template, half_period=2.0,
                                frames_per_half_period=6)
        spec = NoiseSpec(base, np.full_like(base, 0.2))
        rng = np.random.default_rng(0)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        state = Statevector(n, amps / np.linalg.norm(amps))
        fast = floquet_propagate(state, sched, spec, 5, np.random.default_rng(3))
        slow = floquet_propagate(state, sched, spec, 5, np.random.default_rng(3),
                                 observer=lambda i, s, h: None)
        assert np.max(np.abs(fast.amplitudes - slow.amplitudes)) < 1e-12

    def test_norm_preserved_over_many_periods(self):
        n = 2
        template = all_to_all_ising_template(n)
        base = np.array([0.7, -0.3, 0.5])
        sched = FloquetSchedule(n, template, frames_per_half_period=3)
        spec = NoiseSpec(base, np.full(3, 0.1))
        out = floquet_propagate(zero_state(n), sched, spec, 100,
                                np.random.default_rng(5))
        assert abs(out.norm_sq() - 1.0) < 1e-9

    def test_half_period_count_guard(self):
        sched = _schedule()
        spec = NoiseSpec(np.array([0.3]), np.zeros(1))
        with pytest.raises(ValueError):
            list(frame_sequence(sched, spec, 0, None))
