"""Problem Hamiltonian ingestion and built-in model Hamiltonians.

Problem files are UTF-8 JSON documents with top-level fields ``n_qubits``,
``terms`` (array of ``{coeff_re, coeff_im, paulis}`` objects) and an
optional ``metadata`` object (``molecule_name``, ``bond_distance_angstrom``,
``reference_ground_energy``).  Coefficients must be real to 1e-12: the
operator is Hermitian by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .operators import PauliSum, PauliTerm

HERMITICITY_TOL = 1e-12


class ParseError(Exception):
    """Malformed problem document; message identifies the offending field."""


@dataclass(frozen=True)
class DriftSpec:
    """Van der Waals drift on a 1-D chain: C6 in kHz * length^6, nearest
    neighbor spacing r."""

    n_qubits: int
    c6: float
    r: float

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.r <= 0:
            raise ValueError("spacing r must be > 0")

    @property
    def nn_strength(self) -> float:
        """Nearest-neighbor interaction V = C6 / r^6 (kHz)."""
        return self.c6 / self.r**6


def drift_from_strength(n_qubits: int, v_strength: float) -> DriftSpec:
    """DriftSpec with unit spacing tuned so that V = C6/r^6 = v_strength."""
    return DriftSpec(n_qubits=n_qubits, c6=v_strength, r=1.0)


def build_drift_diagonal(spec: DriftSpec) -> np.ndarray:
    """Diagonal (length 2^n, kHz) of sum_{i<j} C6/(r|i-j|)^6 |11><11|_{ij}."""
    n = spec.n_qubits
    diag = np.zeros(2**n)
    idx = np.arange(2**n, dtype=np.uint64)
    bits = [((idx >> np.uint64(n - 1 - q)) & np.uint64(1)).astype(bool)
            for q in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v_ij = spec.c6 / (spec.r * (j - i)) ** 6
            diag[bits[i] & bits[j]] += v_ij
    return diag


def build_tfim(n: int, j_coupling: float, h_field: float) -> PauliSum:
    """Transverse-field Ising chain: -j sum Z_i Z_{i+1} - h sum X_i."""
    if n < 1:
        raise ValueError("n must be >= 1")
    terms = []
    for i in range(n - 1):
        axes = "I" * i + "ZZ" + "I" * (n - i - 2)
        terms.append(PauliTerm(-j_coupling, axes))
    for i in range(n):
        axes = "I" * i + "X" + "I" * (n - i - 1)
        terms.append(PauliTerm(-h_field, axes))
    return PauliSum(n_qubits=n, terms=tuple(terms))


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r} in {where}")
    return obj[key]


def parse_pauli_sum(text: str | bytes) -> tuple[PauliSum, dict]:
    """Parse a problem document; returns (PauliSum, metadata dict)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be an object")
    n_qubits = _require(doc, "n_qubits", "document")
    if not isinstance(n_qubits, int) or n_qubits < 1:
        raise ParseError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    raw_terms = _require(doc, "terms", "document")
    if not isinstance(raw_terms, list):
        raise ParseError("terms must be an array")
    terms = []
    for i, rec in enumerate(raw_terms):
        where = f"terms[{i}]"
        if not isinstance(rec, dict):
            raise ParseError(f"{where} must be an object")
        coeff_re = _require(rec, "coeff_re", where)
        coeff_im = _require(rec, "coeff_im", where)
        paulis = _require(rec, "paulis", where)
        if abs(coeff_im) > HERMITICITY_TOL:
            raise ParseError(
                f"{where}: coeff_im = {coeff_im} violates Hermiticity "
                f"(|coeff_im| must be <= {HERMITICITY_TOL})"
            )
        if not isinstance(paulis, str) or len(paulis) != n_qubits:
            raise ParseError(
                f"{where}: paulis {paulis!r} must be a string of length {n_qubits}"
            )
        try:
            terms.append(PauliTerm(float(coeff_re), paulis))
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from exc
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object")
    return PauliSum(n_qubits=n_qubits, terms=tuple(terms)), dict(metadata)


def serialize_pauli_sum(h: PauliSum, metadata: dict | None = None) -> str:
    """Inverse of parse_pauli_sum (term multiset round-trips exactly)."""
    doc = {
        "n_qubits": h.n_qubits,
        "terms": [
            {"coeff_re": t.coefficient, "coeff_im": 0.0, "paulis": t.axes}
            for t in h.terms
        ],
    }
    if metadata:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=2)


def load_problem(path: str | Path) -> tuple[PauliSum, dict]:
    """Read and parse a problem file."""
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_pauli_sum(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
