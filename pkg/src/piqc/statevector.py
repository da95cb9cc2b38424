"""Statevector kernels: Pauli application, rotations, diagonal unitaries.

States are 1-D complex128 arrays of length 2^n (big-endian qubit order,
see :mod:`piqc.operators`).  All operations are pure: the input array is
never modified.  Batched variants take a stack of states with the batch
axis first and per-state angles; they exist so trajectory ensembles do not
pay the per-call numpy overhead gate by gate.
"""

from __future__ import annotations

import numpy as np

from .operators import PauliSum, PauliTerm

NORM_TOL = 1e-10
_IMAG_TOL = 1e-10


def n_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(state.shape[-1]))
    if 2**n != state.shape[-1]:
        raise ValueError(f"state length {state.shape[-1]} is not a power of two")
    return n


def zero_state(n_qubits: int) -> np.ndarray:
    """|0...0> on n qubits."""
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def basis_state(n_qubits: int, bits: str) -> np.ndarray:
    """Computational basis state from a bit string, e.g. ``"01"`` -> |01>."""
    if len(bits) != n_qubits:
        raise ValueError(f"bit string {bits!r} does not match {n_qubits} qubits")
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[int(bits, 2)] = 1.0
    return psi


def _term_masks(axes: str) -> tuple[int, int, int]:
    """Bit masks (flip, y, z) for a Pauli string; qubit 0 is the MSB."""
    n = len(axes)
    flip = y_mask = z_mask = 0
    for q, ax in enumerate(axes):
        bit = 1 << (n - 1 - q)
        if ax in "XY":
            flip |= bit
        if ax == "Y":
            y_mask |= bit
        elif ax == "Z":
            z_mask |= bit
    return flip, y_mask, z_mask


def apply_pauli_term(state: np.ndarray, term: PauliTerm) -> np.ndarray:
    """Return ``coefficient * (P @ state)`` using bit masks, no dense matrices."""
    n = n_qubits_of(state)
    if term.n_qubits != n:
        raise ValueError(f"term acts on {term.n_qubits} qubits, state has {n}")
    flip, y_mask, z_mask = _term_masks(term.axes)
    idx = np.arange(state.shape[-1], dtype=np.uint64)
    n_y = bin(y_mask).count("1")
    signs = np.bitwise_count(idx & np.uint64(y_mask | z_mask)) & 1
    phase = term.coefficient * (1j**n_y) * np.where(signs, -1.0, 1.0)
    out = np.empty_like(state, dtype=complex)
    out[..., idx ^ np.uint64(flip)] = phase * state[..., idx]
    return out


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """<psi|H|psi> for a Hermitian Pauli sum; the residual imaginary part
    must stay below 1e-10 and is discarded."""
    n = n_qubits_of(state)
    if h.n_qubits != n:
        raise ValueError(f"operator acts on {h.n_qubits} qubits, state has {n}")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-8")
    acc = 0.0 + 0.0j
    for term in h.terms:
        acc += np.vdot(state, apply_pauli_term(state, term))
    if abs(acc.imag) > _IMAG_TOL:
        raise ArithmeticError(
            f"expectation imaginary part {acc.imag} exceeds {_IMAG_TOL}"
        )
    return float(acc.real)


def expectation_batch(states: np.ndarray, h: PauliSum) -> np.ndarray:
    """Energies for a stack of states, shape (N, 2^n) -> (N,)."""
    acc = np.zeros(states.shape[0], dtype=complex)
    for term in h.terms:
        acc += np.einsum("ij,ij->i", states.conj(), apply_pauli_term(states, term))
    return acc.real


def _rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """Exact 2x2 exponential e^{-i angle sigma/2}."""
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "Y":
        return np.array([[c, -s], [s, c]])
    if axis == "Z":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise ValueError(f"invalid rotation axis {axis!r}")


def apply_rotation(state: np.ndarray, qubit: int, axis: str, angle: float) -> np.ndarray:
    """Apply e^{-i angle sigma/2} on one qubit (exact, norm preserving)."""
    n = n_qubits_of(state)
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    u = _rotation_matrix(axis, angle)
    psi = state.reshape((2,) * n)
    psi = np.tensordot(u, psi, axes=([1], [qubit]))
    psi = np.moveaxis(psi, 0, qubit)
    return np.ascontiguousarray(psi).reshape(2**n)


def apply_rotation_batch(
    states: np.ndarray, qubit: int, axis: str, angles: np.ndarray
) -> np.ndarray:
    """Batched rotation: states (N, 2^n), one angle per state."""
    n_batch = states.shape[0]
    n = n_qubits_of(states)
    psi = states.reshape((n_batch,) + (2,) * n)
    a = np.moveaxis(psi, 1 + qubit, -1)
    half = np.asarray(angles, dtype=float) / 2.0
    c = np.cos(half).reshape((n_batch,) + (1,) * (n - 1))
    s = np.sin(half).reshape((n_batch,) + (1,) * (n - 1))
    a0, a1 = a[..., 0], a[..., 1]
    if axis == "X":
        b0 = c * a0 - 1j * s * a1
        b1 = -1j * s * a0 + c * a1
    elif axis == "Y":
        b0 = c * a0 - s * a1
        b1 = s * a0 + c * a1
    elif axis == "Z":
        b0 = (c - 1j * s) * a0
        b1 = (c + 1j * s) * a1
    else:
        raise ValueError(f"invalid rotation axis {axis!r}")
    out = np.stack([b0, b1], axis=-1)
    out = np.moveaxis(out, -1, 1 + qubit)
    return np.ascontiguousarray(out).reshape(n_batch, 2**n)


def apply_diagonal_unitary(state: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Multiply amplitude k by e^{-i phases[k]}."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape[0] != state.shape[-1]:
        raise ValueError(
            f"phase vector length {phases.shape[0]} does not match state "
            f"dimension {state.shape[-1]}"
        )
    return state * np.exp(-1j * phases)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2."""
    return float(abs(np.vdot(a, b)) ** 2)
