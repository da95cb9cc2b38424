"""Pauli-sum operators and exact diagonalization.

Basis convention: computational basis index ``k`` is the big-endian bit
string of the qubits, so qubit 0 is the most significant bit and the ket
``|01>`` on two qubits is index 1.  A Pauli string such as ``"YX"`` reads
left to right as (qubit 0, qubit 1), i.e. the operator Y ⊗ X.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PAULI_AXES = frozenset("IXYZ")

_PAULI_2X2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSE_QUBIT_LIMIT = 12


class CapabilityError(Exception):
    """Raised when a request exceeds the dense-algebra feasibility bound."""


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string: ``coefficient * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}``."""

    coefficient: float
    axes: str

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient!r}")
        bad = set(self.axes) - PAULI_AXES
        if bad:
            raise ValueError(f"invalid Pauli axes {sorted(bad)} in {self.axes!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    def matrix(self) -> np.ndarray:
        """Dense matrix of this term (oracle path; exponential in n)."""
        m = np.array([[self.coefficient]], dtype=complex)
        for ax in self.axes:
            m = np.kron(m, _PAULI_2X2[ax])
        return m


@dataclass(frozen=True)
class PauliSum:
    """Hermitian operator as a real-weighted sum of Pauli strings."""

    n_qubits: int
    terms: tuple[PauliTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.n_qubits != self.n_qubits:
                raise ValueError(
                    f"term {t.axes!r} has {t.n_qubits} qubits, expected {self.n_qubits}"
                )

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n Hermitian matrix (oracle path)."""
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self.terms:
            m += t.matrix()
        return m

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix()))


@dataclass(frozen=True)
class Spectrum:
    """Full eigenvalue list (ascending) plus the ground eigenvector."""

    eigenvalues: np.ndarray
    ground_vector: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def exact_ground_state(h: PauliSum) -> Spectrum:
    """Dense diagonalization of ``h``; reference energies for benchmarks.

    Raises CapabilityError above the dense feasibility bound (n > 12).  For
    degenerate ground spaces the returned vector is whatever the solver
    yields for the smallest eigenvalue; compare energies, not vectors.
    """
    if h.n_qubits > DENSE_QUBIT_LIMIT:
        raise CapabilityError(
            f"{h.n_qubits} qubits exceeds the dense diagonalization limit "
            f"({DENSE_QUBIT_LIMIT})"
        )
    mat = h.matrix()
    evals, evecs = np.linalg.eigh(mat)
    ground = np.ascontiguousarray(evecs[:, 0])
    ground = ground / np.linalg.norm(ground)
    return Spectrum(eigenvalues=evals, ground_vector=ground)
