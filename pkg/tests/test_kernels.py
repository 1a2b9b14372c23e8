"""Backend parity: the compiled kernels must match the pure-numpy ones."""

import numpy as np
import pytest

from qtclab import _kernels
from qtclab._kernels import pure


def _backends():
    mods = [pure]
    if "cython" in _kernels.available_backends():
        mods.append(_kernels.get_backend("cython"))
    return mods


def random_amps(n_qubits, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return np.ascontiguousarray(amps / np.linalg.norm(amps))


def test_cython_backend_is_built():
    assert "cython" in _kernels.available_backends()


@pytest.mark.parametrize("n", [1, 3, 5])
def test_apply_ry_parity(n):
    amps = random_amps(n, 1)
    for qubit in range(n):
        results = [np.asarray(m.apply_ry(amps, qubit, 0.77)) for m in _backends()]
        for r in results[1:]:
            assert np.allclose(r, results[0], atol=1e-14)


@pytest.mark.parametrize("pair", [(0, 1), (1, 0), (2, 0)])
def test_apply_cry_parity(pair):
    amps = random_amps(3, 2)
    results = [np.asarray(m.apply_cry(amps, *pair, -1.3)) for m in _backends()]
    for r in results[1:]:
        assert np.allclose(r, results[0], atol=1e-14)


def test_apply_dense_parity():
    rng = np.random.default_rng(3)
    amps = random_amps(4, 3)
    mat = np.ascontiguousarray(rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
    results = [np.asarray(m.apply_dense(amps, mat)) for m in _backends()]
    for r in results[1:]:
        assert np.allclose(r, results[0], atol=1e-12)


def test_apply_phases_parity():
    rng = np.random.default_rng(4)
    amps = random_amps(4, 4)
    phases = np.ascontiguousarray(np.exp(1j * rng.uniform(0, 2 * np.pi, 16)))
    results = [np.asarray(m.apply_phases(amps, phases)) for m in _backends()]
    for r in results[1:]:
        assert np.allclose(r, results[0], atol=1e-14)


@pytest.mark.parametrize("mask", [0b0001, 0b0011, 0b1100, 0b1111])
def test_expect_zmask_parity_and_oracle(mask):
    amps = random_amps(4, 5)
    # dense-diagonal oracle
    idx = np.arange(16)
    signs = np.array([(-1) ** bin(i & mask).count("1") for i in idx])
    oracle = float(np.sum(signs * np.abs(amps) ** 2))
    for m in _backends():
        assert m.expect_zmask(amps, mask) == pytest.approx(oracle, abs=1e-13)


def test_expect_pauli_parity_and_oracle():
    from qtclab.core import PauliString

    rng = np.random.default_rng(6)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        amps = random_amps(n, int(rng.integers(1 << 30)))
        factors = "".join(rng.choice(list("IXYZ")) for _ in range(n))
        string = PauliString(factors)
        flip, phase, n_y = string.masks()
        oracle = complex(np.vdot(amps, string.to_matrix() @ amps))
        for m in _backends():
            got = m.expect_pauli(amps, flip, phase, n_y)
            assert got == pytest.approx(oracle, abs=1e-12)


def test_set_backend_roundtrip():
    original = _kernels.backend_name()
    try:
        _kernels.set_backend("pure")
        assert _kernels.backend_name() == "pure"
    finally:
        _kernels.set_backend(original)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")
