"""Dense statevector simulation of small spin registers.

Conventions, fixed throughout the package:

* qubit 0 is the least significant bit of the basis index, so basis state
  ``|b_{n-1} ... b_1 b_0>`` lives at index ``sum(b_j << j)``;
* amplitudes are complex128; all tolerances downstream assume double
  precision;
* every operation is a pure function returning a new value, global phase
  is never constrained.

Time evolution is exact: the Hamiltonian matrix is eigendecomposed and the
propagator applied in the eigenbasis (states here have at most a few dozen
amplitudes, so Trotterization would only add error). Hamiltonians without
X terms are diagonal in the computational basis and take a cheaper
phase-multiplication path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as kernels

MAX_QUBITS = 12

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class Statevector:
    """Normalized amplitude vector over `n_qubits` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for "
                f"{self.n_qubits} qubits, got shape {amps.shape}"
            )

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with a real coefficient.

    `factors[j]` is the label on qubit j, one of I/X/Y/Z.
    """

    factors: str
    coefficient: float = 1.0

    def __post_init__(self):
        if any(f not in "IXYZ" for f in self.factors):
            raise ValueError(f"invalid Pauli labels in {self.factors!r}")
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    def masks(self) -> tuple[int, int, int]:
        """(flip_mask, phase_mask, n_y): X|Y bits, Y|Z bits, Y count."""
        flip = phase = n_y = 0
        for j, f in enumerate(self.factors):
            if f in "XY":
                flip |= 1 << j
            if f in "YZ":
                phase |= 1 << j
            if f == "Y":
                n_y += 1
        return flip, phase, n_y

    def to_matrix(self) -> np.ndarray:
        mat = np.array([[self.coefficient]], dtype=complex)
        for f in self.factors:  # qubit 0 = least significant: kron from the left
            mat = np.kron(_PAULI_1Q[f], mat)
        return mat


@dataclass(frozen=True)
class IsingHamiltonian:
    """One-body + two-body (ZZ) spin Hamiltonian with optional qubit projectors.

    `one_body` entries are (qubit, axis, coefficient) with axis in X/Y/Z;
    `two_body` entries are (qubit_a, qubit_b, coefficient) acting as ZZ;
    `projector_terms` entries are (qubit, p0, p1) for
    p0*|0><0| + p1*|1><1| on that qubit. Real coefficients keep the
    operator Hermitian by construction.
    """

    n_qubits: int
    one_body: tuple[tuple[int, str, float], ...] = ()
    two_body: tuple[tuple[int, int, float], ...] = ()
    projector_terms: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "one_body", tuple(
            (int(q), str(ax), float(c)) for q, ax, c in self.one_body))
        object.__setattr__(self, "two_body", tuple(
            (int(a), int(b), float(c)) for a, b, c in self.two_body))
        object.__setattr__(self, "projector_terms", tuple(
            (int(q), float(p0), float(p1)) for q, p0, p1 in self.projector_terms))
        for q, ax, c in self.one_body:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"one_body qubit {q} out of range")
            if ax not in "XYZ":
                raise ValueError(f"one_body axis {ax!r} invalid")
            if not np.isfinite(c):
                raise ValueError("one_body coefficient must be finite")
        seen = set()
        for a, b, c in self.two_body:
            if a == b or not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise ValueError(f"two_body pair ({a}, {b}) invalid")
            pair = (min(a, b), max(a, b))
            if pair in seen:
                raise ValueError(f"two_body pair {pair} repeated")
            seen.add(pair)
            if not np.isfinite(c):
                raise ValueError("two_body coefficient must be finite")
        for q, p0, p1 in self.projector_terms:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"projector qubit {q} out of range")

    @property
    def is_diagonal(self) -> bool:
        return all(ax == "Z" for _, ax, _ in self.one_body)

    def coefficients(self) -> np.ndarray:
        """Coefficient vector in term order: one_body then two_body."""
        return np.array([c for _, _, c in self.one_body]
                        + [c for _, _, c in self.two_body])

    def with_coefficients(self, coeffs: Sequence[float]) -> "IsingHamiltonian":
        """Copy with one_body/two_body coefficients replaced, in term order."""
        n1, n2 = len(self.one_body), len(self.two_body)
        if len(coeffs) != n1 + n2:
            raise ValueError(f"expected {n1 + n2} coefficients, got {len(coeffs)}")
        one = tuple((q, ax, float(c)) for (q, ax, _), c in zip(self.one_body, coeffs[:n1]))
        two = tuple((a, b, float(c)) for (a, b, _), c in zip(self.two_body, coeffs[n1:]))
        return IsingHamiltonian(self.n_qubits, one, two, self.projector_terms)

    def with_projector(self, qubit: int, p0: float, p1: float) -> "IsingHamiltonian":
        return IsingHamiltonian(
            self.n_qubits, self.one_body, self.two_body,
            self.projector_terms + ((qubit, p0, p1),))


def zero_state(n_qubits: int) -> Statevector:
    """|0...0> on `n_qubits` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def apply_ry(state: Statevector, qubit: int, angle: float) -> Statevector:
    """Rotate one qubit about Y by `angle` radians."""
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    if not np.isfinite(angle):
        raise ValueError("angle must be finite")
    return Statevector(state.n_qubits, kernels.apply_ry(state.amplitudes, qubit, angle))


def apply_cry(state: Statevector, control: int, target: int, angle: float) -> Statevector:
    """Controlled-Ry on `target`, conditioned on `control`."""
    n = state.n_qubits
    if not (0 <= control < n and 0 <= target < n) or control == target:
        raise ValueError(f"bad control/target pair ({control}, {target})")
    if not np.isfinite(angle):
        raise ValueError("angle must be finite")
    return Statevector(n, kernels.apply_cry(state.amplitudes, control, target, angle))


def expectation(state: Statevector,
                observable: PauliString | Iterable[PauliString]) -> float:
    """Real expectation value of a sum of Pauli strings."""
    if isinstance(observable, PauliString):
        observable = (observable,)
    total = 0.0 + 0.0j
    for string in observable:
        if string.n_qubits != state.n_qubits:
            raise ValueError(
                f"observable acts on {string.n_qubits} qubits, state has {state.n_qubits}")
        flip, phase, n_y = string.masks()
        total += string.coefficient * kernels.expect_pauli(
            state.amplitudes, flip, phase, n_y)
    if abs(total.imag) > 1e-12:
        raise ValueError(f"expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


@lru_cache(maxsize=32)
def _diag_term_basis(n_qubits: int, one_sites: tuple[int, ...],
                     two_sites: tuple[tuple[int, int], ...]) -> np.ndarray:
    """Per-term diagonal sign patterns; diag = coeffs @ basis for Z/ZZ terms."""
    idx = np.arange(1 << n_qubits)
    rows = [1.0 - 2.0 * ((idx >> q) & 1) for q in one_sites]
    rows += [(1.0 - 2.0 * ((idx >> a) & 1)) * (1.0 - 2.0 * ((idx >> b) & 1))
             for a, b in two_sites]
    return np.array(rows)


def diagonal_vector(h: IsingHamiltonian) -> np.ndarray:
    """Diagonal of the Hamiltonian matrix (valid only when is_diagonal)."""
    if not h.is_diagonal:
        raise ValueError("Hamiltonian has X/Y terms; no diagonal representation")
    basis = _diag_term_basis(h.n_qubits,
                             tuple(q for q, _, _ in h.one_body),
                             tuple((a, b) for a, b, _ in h.two_body))
    if basis.size:
        diag = h.coefficients() @ basis
    else:
        diag = np.zeros(1 << h.n_qubits)
    if h.projector_terms:
        idx = np.arange(1 << h.n_qubits)
        for q, p0, p1 in h.projector_terms:
            diag = diag + np.where((idx >> q) & 1 == 0, p0, p1)
    return diag


def to_matrix(h: IsingHamiltonian) -> np.ndarray:
    """Dense Hermitian matrix of the Hamiltonian."""
    if h.n_qubits > MAX_QUBITS:
        raise ValueError(f"n_qubits {h.n_qubits} exceeds dense-matrix guard {MAX_QUBITS}")
    dim = 1 << h.n_qubits
    if h.is_diagonal:
        return np.diag(diagonal_vector(h).astype(complex))
    mat = np.zeros((dim, dim), dtype=complex)
    for q, ax, c in h.one_body:
        factors = ["I"] * h.n_qubits
        factors[q] = ax
        mat += PauliString("".join(factors), c).to_matrix()
    idx = np.arange(dim)
    diag = np.zeros(dim)
    for a, b, c in h.two_body:
        diag += c * (1.0 - 2.0 * ((idx >> a) & 1)) * (1.0 - 2.0 * ((idx >> b) & 1))
    for q, p0, p1 in h.projector_terms:
        bit = (idx >> q) & 1
        diag += np.where(bit == 0, p0, p1)
    mat[np.diag_indices(dim)] += diag
    return mat


class FrameOperator:
    """Precomputed single-frame propagator exp(-i H dt).

    Diagonal Hamiltonians store the diagonal, anything else the eigensystem;
    `apply` advances an amplitude vector by one frame and `apply_power` by n
    frames in a single matrix/phase application (both exact). Reusing one
    FrameOperator across the frames of a half-period avoids repeated
    eigendecompositions.
    """

    __slots__ = ("dt", "diag", "phases", "unitary", "_powers")

    def __init__(self, h: IsingHamiltonian, dt: float):
        if not np.isfinite(dt):
            raise ValueError("duration must be finite")
        self.dt = dt
        self._powers: dict[int, np.ndarray] = {}
        if h.is_diagonal:
            self.diag = diagonal_vector(h)
            self.phases = np.exp(-1j * dt * self.diag)
            self.unitary = None
        else:
            energies, basis = np.linalg.eigh(to_matrix(h))
            self.diag = None
            self.phases = None
            self.unitary = (basis * np.exp(-1j * dt * energies)) @ basis.conj().T
            self._powers[1] = self.unitary

    def apply(self, amps: np.ndarray) -> np.ndarray:
        if self.phases is not None:
            return kernels.apply_phases(amps, self.phases)
        return kernels.apply_dense(amps, self.unitary)

    def apply_power(self, amps: np.ndarray, n: int) -> np.ndarray:
        """Advance by n frames at once: exp(-i H n dt) applied exactly."""
        if n == 1:
            return self.apply(amps)
        if self.diag is not None:
            phases = self._powers.get(n)
            if phases is None:
                phases = np.exp(-1j * (n * self.dt) * self.diag)
                self._powers[n] = phases
            return kernels.apply_phases(amps, phases)
        unitary = self._powers.get(n)
        if unitary is None:
            unitary = np.linalg.matrix_power(self.unitary, n)
            self._powers[n] = unitary
        return kernels.apply_dense(amps, unitary)


@lru_cache(maxsize=64)
def _cached_frame_operator(h: IsingHamiltonian, dt: float) -> FrameOperator:
    return FrameOperator(h, dt)


def frame_operator(h: IsingHamiltonian, dt: float, cache: bool = False) -> FrameOperator:
    """Single-frame propagator; `cache=True` memoizes (drive Hamiltonians recur)."""
    if cache:
        return _cached_frame_operator(h, dt)
    return FrameOperator(h, dt)


def evolve(state: Statevector, h: IsingHamiltonian, duration: float) -> Statevector:
    """exp(-i H duration) |state>, computed by exact eigendecomposition."""
    if h.n_qubits != state.n_qubits:
        raise ValueError(
            f"Hamiltonian on {h.n_qubits} qubits, state on {state.n_qubits}")
    op = FrameOperator(h, duration)
    return Statevector(state.n_qubits, op.apply(state.amplitudes))
