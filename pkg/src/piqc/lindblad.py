"""Density-matrix propagation under a controlled Lindblad equation.

This is a correctness oracle for the trajectory machinery, not a product
feature: the ensemble average of the stochastic trajectories must
reproduce the propagated density matrix (unraveling).  The noise matrix is
scalar, ``D * identity`` over the control channels.
"""

from __future__ import annotations

import numpy as np

from .dynamics import PulseSchedule
from .operators import PauliSum, PauliTerm


class IntegrationStepError(Exception):
    """Output violated a density-matrix invariant; shrink dt."""


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10, eig_tol: float = 1e-9):
    """Validate Hermiticity, unit trace and positivity of ``rho``."""
    if np.abs(rho - rho.conj().T).max() > tol:
        raise IntegrationStepError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise IntegrationStepError("density matrix trace deviates from 1")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -eig_tol:
        raise IntegrationStepError("density matrix has a negative eigenvalue")


def pure_density(state: np.ndarray) -> np.ndarray:
    """Projector |psi><psi|."""
    return np.outer(state, state.conj())


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2) ||a - b||_1 for Hermitian a, b."""
    diff = (a - b + (a - b).conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def _liouvillian(h: np.ndarray, ops: list[np.ndarray], d_strength: float):
    def deriv(rho: np.ndarray) -> np.ndarray:
        out = -1j * (h @ rho - rho @ h)
        for a in ops:
            aa = a @ a
            out += d_strength * (a @ rho @ a - 0.5 * (aa @ rho + rho @ aa))
        return out

    return deriv


def lindblad_propagate(
    rho0: np.ndarray,
    h0: PauliSum,
    controls: PulseSchedule,
    control_ops: list[PauliTerm],
    d_strength: float,
    t_final: float,
    dt: float | None = None,
) -> np.ndarray:
    """Integrate the controlled Lindblad equation with fixed-step RK4.

    ``controls.values[k, a]`` multiplies ``control_ops[a]`` on segment k.
    ``dt`` defaults to 1/100 of the shortest segment and is rounded so
    that an integer number of steps fits each segment exactly.
    """
    if d_strength < 0:
        raise ValueError("noise strength D must be >= 0")
    seg_lengths = np.diff(controls.segment_bounds)
    if dt is None:
        dt = float(seg_lengths.min()) / 100.0
    h_drift = h0.matrix()
    op_mats = [t.matrix() for t in control_ops]
    rho = rho0.astype(complex).copy()
    t = 0.0
    for k, seg in enumerate(seg_lengths):
        if t >= t_final:
            break
        seg_end = min(float(controls.segment_bounds[k + 1]), t_final)
        span = seg_end - t
        n_steps = max(1, int(round(span / dt)))
        h_step = span / n_steps
        h_total = h_drift + sum(
            controls.values[k, a] * op_mats[a] for a in range(len(op_mats))
        )
        deriv = _liouvillian(h_total, op_mats, d_strength)
        for _ in range(n_steps):
            k1 = deriv(rho)
            k2 = deriv(rho + 0.5 * h_step * k1)
            k3 = deriv(rho + 0.5 * h_step * k2)
            k4 = deriv(rho + h_step * k3)
            rho = rho + (h_step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = seg_end
    check_density_matrix(rho, tol=max(1e-10, 10 * dt**4), eig_tol=max(1e-9, 10 * dt**4))
    return rho
