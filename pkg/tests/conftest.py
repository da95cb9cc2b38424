from pathlib import Path

import numpy as np
import pytest

from piqc.dynamics import AnsatzSpec
from piqc.hamiltonians import build_drift_diagonal, drift_from_strength
from piqc.statevector import apply_diagonal_unitary, apply_rotation

REPO_ROOT = Path(__file__).resolve().parents[1]
PROBLEMS = REPO_ROOT / "problems"


@pytest.fixture
def h2_problem_path() -> Path:
    return PROBLEMS / "h2_sto3g_0p735.json"


@pytest.fixture
def tfim2_problem_path() -> Path:
    return PROBLEMS / "tfim_2q.json"


def standard_ansatz(n_qubits: int, n_layers: int, v_strength: float = 0.1,
                    tau_v: float = 10.0) -> AnsatzSpec:
    """ZXZ layers with the van der Waals entangler used throughout."""
    drift = build_drift_diagonal(drift_from_strength(n_qubits, v_strength))
    return AnsatzSpec(
        n_qubits=n_qubits, n_layers=n_layers, axes=("Z", "X", "Z"),
        entangler_phases=drift * tau_v, tau_v=tau_v,
    )


def integrate_circuit_sse(psi0, ansatz, params, fine_paths, dt):
    """Independent oracle: integrate the continuous randomized-circuit
    dynamics at resolution dt.

    ``fine_paths[(layer, m)]`` holds the Wiener increments of rotation
    interval (layer, m), shape (1/dt, n_qubits).  Each rotation interval
    applies the half-angle generator per step; each drift interval spreads
    the entangler phases uniformly over unit time.
    """
    psi = psi0.astype(complex).copy()
    n_sub = int(round(1.0 / dt))
    for layer in range(ansatz.n_layers):
        for m in range(ansatz.rotations_per_layer):
            axis = ansatz.axes[m]
            path = fine_paths[(layer, m)]
            for s in range(n_sub):
                for q in range(ansatz.n_qubits):
                    x = params[layer, m, q] * dt + path[s, q]
                    psi = apply_rotation(psi, q, axis, x)
                psi = psi / np.linalg.norm(psi)
        for _ in range(n_sub):
            psi = apply_diagonal_unitary(psi, ansatz.entangler_phases * dt)
    return psi
