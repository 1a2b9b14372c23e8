"""Pure-numpy statevector kernels (fallback backend).

All functions take a contiguous complex128 amplitude vector of length 2**n
and return new arrays; nothing is mutated in place. Qubit 0 is the least
significant bit of the basis index.
"""

from __future__ import annotations

from functools import lru_cache
from math import cos, sin

import numpy as np

BACKEND_NAME = "pure"


@lru_cache(maxsize=256)
def _zmask_signs(dim: int, mask: int) -> np.ndarray:
    """Sign vector (-1)**popcount(i & mask) for i = 0..dim-1."""
    idx = np.arange(dim, dtype=np.uint64) & np.uint64(mask)
    parity = np.bitwise_count(idx) & np.uint64(1)
    return 1.0 - 2.0 * parity.astype(np.float64)


@lru_cache(maxsize=256)
def _cry_indices(dim: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis-index pairs (control set, target clear) and their target-set partners."""
    idx = np.arange(dim)
    sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
    i0 = idx[sel]
    return i0, i0 | (1 << target)


def apply_ry(amps: np.ndarray, qubit: int, angle: float) -> np.ndarray:
    """Rotate `qubit` about Y by `angle`: [[c, -s], [s, c]] with c=cos(a/2)."""
    c, s = cos(0.5 * angle), sin(0.5 * angle)
    step = 1 << qubit
    a = amps.reshape(-1, 2, step)
    out = np.empty_like(a)
    out[:, 0, :] = c * a[:, 0, :] - s * a[:, 1, :]
    out[:, 1, :] = s * a[:, 0, :] + c * a[:, 1, :]
    return out.reshape(-1)


def apply_cry(amps: np.ndarray, control: int, target: int, angle: float) -> np.ndarray:
    """Controlled-Ry: rotate `target` where `control` is set."""
    c, s = cos(0.5 * angle), sin(0.5 * angle)
    i0, i1 = _cry_indices(amps.shape[0], control, target)
    out = amps.copy()
    a0, a1 = amps[i0], amps[i1]
    out[i0] = c * a0 - s * a1
    out[i1] = s * a0 + c * a1
    return out


def apply_dense(amps: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Dense matrix-vector product."""
    return matrix @ amps


def apply_phases(amps: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Elementwise multiply by a phase vector (diagonal propagator)."""
    return amps * phases


def expect_zmask(amps: np.ndarray, mask: int) -> float:
    """<psi| Z-string |psi> for the Z factors marked by bitmask `mask`."""
    signs = _zmask_signs(amps.shape[0], mask)
    probs = amps.real * amps.real + amps.imag * amps.imag
    return float(signs @ probs)


def expect_pauli(amps: np.ndarray, flip_mask: int, phase_mask: int, n_y: int) -> complex:
    """<psi| P |psi> for a Pauli string given as bitmasks.

    flip_mask marks X and Y factors (bit flips), phase_mask marks Y and Z
    factors (sign flips), n_y counts Y factors (global i**n_y).
    """
    dim = amps.shape[0]
    if flip_mask == 0:
        val = expect_zmask(amps, phase_mask) * (1j**n_y)
        return complex(val)
    src = np.arange(dim, dtype=np.uint64) ^ np.uint64(flip_mask)
    parity = np.bitwise_count(src & np.uint64(phase_mask)) & np.uint64(1)
    signs = 1.0 - 2.0 * parity.astype(np.float64)
    return complex((1j**n_y) * np.sum(np.conj(amps) * signs * amps[src.astype(np.intp)]))
