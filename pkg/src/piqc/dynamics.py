"""Stochastic quantum trajectories, two ways.

Pulse route: integrate the linear stochastic Schrodinger equation with
piecewise-constant controls, operator splitting and exact single-qubit
exponentials.  Gate route: execute the layered ansatz with Gaussian noise
added directly to the rotation angles (the randomized-circuit shortcut:
each integrated Wiener increment over a unit gate interval is a Gaussian
of variance D, so no fine path is ever generated).

Conventions, recorded once:

* pulse channels couple through the bare Pauli, step propagator
  ``exp(-i sigma (u dt + dW))`` (no 1/2);
* gate rotations use the half-angle generator, ``exp(-i theta sigma / 2)``.

Trajectory RNG streams are counter-based (Philox) keyed by
(master_seed, stream id), so trajectories are independent, reproducible
and order-insensitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import PauliSum
from .statevector import (
    apply_diagonal_unitary,
    apply_rotation,
    apply_rotation_batch,
    expectation,
    expectation_batch,
    n_qubits_of,
)

_MASK64 = (1 << 64) - 1


def trajectory_rng(master_seed: int, stream: int) -> np.random.Generator:
    """Counter-based RNG stream; distinct (seed, stream) pairs are independent."""
    key = np.array([master_seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def xy_channels(n_qubits: int) -> tuple[tuple[int, str], ...]:
    """Default pulse channel layout: (X_0, Y_0, X_1, Y_1, ...)."""
    return tuple((q, ax) for q in range(n_qubits) for ax in ("X", "Y"))


@dataclass(frozen=True)
class PulseSchedule:
    """Piecewise-constant controls: K segments x n_c channels.

    ``channels[a]`` is a (qubit, axis) pair; ``values[k, a]`` is the
    amplitude (kHz) of channel a on segment k; ``segment_bounds`` are the
    K+1 strictly increasing segment edges (ms) starting at 0.
    """

    segment_bounds: np.ndarray
    values: np.ndarray
    channels: tuple[tuple[int, str], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "segment_bounds", np.asarray(self.segment_bounds, dtype=float)
        )
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if np.any(np.diff(self.segment_bounds) <= 0):
            raise ValueError("segment bounds must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("control values must be finite")
        if self.values.shape != (self.n_segments, self.n_channels):
            raise ValueError(
                f"values shape {self.values.shape} != "
                f"({self.n_segments}, {self.n_channels})"
            )

    @property
    def n_segments(self) -> int:
        return len(self.segment_bounds) - 1

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def horizon(self) -> float:
        return float(self.segment_bounds[-1])

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.diff(self.segment_bounds)

    def with_values(self, values: np.ndarray) -> "PulseSchedule":
        return PulseSchedule(self.segment_bounds, values, self.channels)


def uniform_schedule(
    n_qubits: int, n_segments: int, horizon: float
) -> PulseSchedule:
    """Zero-initialized schedule with equal segments and X/Y channels."""
    bounds = np.linspace(0.0, horizon, n_segments + 1)
    channels = xy_channels(n_qubits)
    values = np.zeros((n_segments, len(channels)))
    return PulseSchedule(bounds, values, channels)


@dataclass(frozen=True)
class AnsatzSpec:
    """Layered ansatz: per layer, M single-qubit rotation slots on every
    qubit followed by one fixed diagonal entangler."""

    n_qubits: int
    n_layers: int
    axes: tuple[str, ...]
    entangler_phases: np.ndarray
    tau_v: float = 10.0
    tau_g: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "entangler_phases", np.asarray(self.entangler_phases, dtype=float)
        )
        object.__setattr__(self, "axes", tuple(self.axes))
        for ax in self.axes:
            if ax not in ("X", "Y", "Z"):
                raise ValueError(f"invalid rotation axis {ax!r}")
        if self.entangler_phases.shape[0] != 2**self.n_qubits:
            raise ValueError("entangler phase vector length must be 2^n")

    @property
    def rotations_per_layer(self) -> int:
        return len(self.axes)

    @property
    def param_shape(self) -> tuple[int, int, int]:
        return (self.n_layers, self.rotations_per_layer, self.n_qubits)

    @property
    def n_params(self) -> int:
        return self.n_layers * self.rotations_per_layer * self.n_qubits

    @property
    def gate_count(self) -> int:
        # per trajectory: L * (M*n rotations + 1 entangler)
        return self.n_layers * (self.rotations_per_layer * self.n_qubits + 1)

    @property
    def horizon(self) -> float:
        return self.n_layers * (self.tau_g + self.tau_v)


@dataclass(frozen=True)
class NoiseRealization:
    """Integrated Wiener increments matching one control set's shape."""

    increments: np.ndarray
    seed_id: int = 0


@dataclass(frozen=True)
class TrajectoryRecord:
    noise: NoiseRealization
    final_state: np.ndarray
    energy: float
    stochastic_cost: float


def sample_noise(
    shape: tuple[int, ...],
    d_strength: float,
    rng: np.random.Generator,
    segment_lengths: np.ndarray | None = None,
) -> NoiseRealization:
    """Independent Gaussian increments.

    Gate shape (L, M, n): variance D per entry (unit gate intervals).
    Pulse shape (K, n_c): variance D * dt_k per row, pass segment_lengths.
    """
    if d_strength < 0:
        raise ValueError("noise strength D must be >= 0")
    if d_strength == 0:
        return NoiseRealization(np.zeros(shape))
    if segment_lengths is not None:
        scale = np.sqrt(d_strength * np.asarray(segment_lengths, dtype=float))
        inc = rng.standard_normal(shape) * scale[:, None]
    else:
        inc = rng.standard_normal(shape) * np.sqrt(d_strength)
    return NoiseRealization(inc)


def sample_wiener_path(
    n_steps: int, n_channels: int, d_strength: float, dt: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Fine Wiener increments, shape (n_steps, n_channels), variance D*dt each."""
    if d_strength == 0:
        return np.zeros((n_steps, n_channels))
    return rng.standard_normal((n_steps, n_channels)) * np.sqrt(d_strength * dt)


def aggregate_path_to_segments(
    path: np.ndarray, dt: float, schedule: PulseSchedule
) -> np.ndarray:
    """Sum fine increments into per-segment Delta W, shape (K, n_c)."""
    out = np.zeros((schedule.n_segments, schedule.n_channels))
    edges = np.rint(schedule.segment_bounds / dt).astype(int)
    for k in range(schedule.n_segments):
        out[k] = path[edges[k]:edges[k + 1]].sum(axis=0)
    return out


def integrate_sse(
    psi0: np.ndarray,
    drift_diag: np.ndarray,
    schedule: PulseSchedule,
    wiener_path: np.ndarray,
    dt: float,
) -> np.ndarray:
    """Propagate the linear SSE by first-order operator splitting.

    Per step: diagonal drift phase, then for each channel the exact
    exponential ``exp(-i sigma (u dt + dW))``, then renormalize.  The
    norm-preserving -(1/2) D H^2 dt term is realized by the
    renormalization, exact for Pauli channels.
    """
    seg_lengths = schedule.segment_lengths
    steps_per_seg = np.rint(seg_lengths / dt).astype(int)
    if not np.allclose(steps_per_seg * dt, seg_lengths, rtol=1e-9, atol=1e-12):
        raise ValueError("dt must divide every control segment")
    if wiener_path.shape != (int(steps_per_seg.sum()), schedule.n_channels):
        raise ValueError(
            f"wiener path shape {wiener_path.shape} != "
            f"({int(steps_per_seg.sum())}, {schedule.n_channels})"
        )
    psi = psi0.astype(complex).copy()
    drift_step = np.asarray(drift_diag, dtype=float) * dt
    step = 0
    for k in range(schedule.n_segments):
        u_k = schedule.values[k]
        for _ in range(steps_per_seg[k]):
            psi = apply_diagonal_unitary(psi, drift_step)
            for a, (qubit, axis) in enumerate(schedule.channels):
                x = u_k[a] * dt + wiener_path[step, a]
                # bare-Pauli generator: exp(-i sigma x) == rotation by 2x
                psi = apply_rotation(psi, qubit, axis, 2.0 * x)
            nrm = np.linalg.norm(psi)
            if abs(nrm - 1.0) > 1e-6:
                raise ArithmeticError(
                    f"norm drifted by {abs(nrm - 1.0)} in one step; shrink dt"
                )
            psi /= nrm
            step += 1
    return psi


def integrate_sse_batch(
    psi0: np.ndarray,
    drift_diag: np.ndarray,
    schedule: PulseSchedule,
    wiener_paths: np.ndarray,
    dt: float,
) -> np.ndarray:
    """Propagate a stack of trajectories, shape (N, n_steps, n_c), that
    share the schedule but carry independent noise.  Step-for-step
    identical to :func:`integrate_sse` applied per trajectory."""
    seg_lengths = schedule.segment_lengths
    steps_per_seg = np.rint(seg_lengths / dt).astype(int)
    if not np.allclose(steps_per_seg * dt, seg_lengths, rtol=1e-9, atol=1e-12):
        raise ValueError("dt must divide every control segment")
    n_batch = wiener_paths.shape[0]
    states = np.tile(psi0.astype(complex), (n_batch, 1))
    drift_phase = np.exp(-1j * np.asarray(drift_diag, dtype=float) * dt)
    step = 0
    for k in range(schedule.n_segments):
        u_k = schedule.values[k]
        for _ in range(steps_per_seg[k]):
            states = states * drift_phase[None, :]
            for a, (qubit, axis) in enumerate(schedule.channels):
                x = u_k[a] * dt + wiener_paths[:, step, a]
                states = apply_rotation_batch(states, qubit, axis, 2.0 * x)
            norms = np.linalg.norm(states, axis=1)
            if np.abs(norms - 1.0).max() > 1e-6:
                raise ArithmeticError("norm drifted beyond 1e-6 in one step")
            states = states / norms[:, None]
            step += 1
    return states


def run_randomized_circuit(
    psi0: np.ndarray,
    ansatz: AnsatzSpec,
    params: np.ndarray,
    noise: NoiseRealization,
) -> np.ndarray:
    """Execute the ansatz with angles ``theta + Delta W`` (exactly
    L * (M*n + 1) gate applications)."""
    params = np.asarray(params, dtype=float)
    if params.shape != ansatz.param_shape or noise.increments.shape != params.shape:
        raise ValueError(
            f"parameter/noise shape mismatch: {params.shape}, "
            f"{noise.increments.shape}, expected {ansatz.param_shape}"
        )
    psi = psi0.astype(complex).copy()
    angles = params + noise.increments
    for layer in range(ansatz.n_layers):
        for m, axis in enumerate(ansatz.axes):
            for q in range(ansatz.n_qubits):
                psi = apply_rotation(psi, q, axis, angles[layer, m, q])
        psi = apply_diagonal_unitary(psi, ansatz.entangler_phases)
    return psi


def run_randomized_circuit_batch(
    psi0: np.ndarray,
    ansatz: AnsatzSpec,
    params: np.ndarray,
    noise_batch: np.ndarray,
) -> np.ndarray:
    """Vectorized executor for a stack of noise draws, shape (N, L, M, n)."""
    n_batch = noise_batch.shape[0]
    states = np.tile(psi0.astype(complex), (n_batch, 1))
    angles = params[None, ...] + noise_batch
    ent = np.exp(-1j * ansatz.entangler_phases)
    for layer in range(ansatz.n_layers):
        for m, axis in enumerate(ansatz.axes):
            for q in range(ansatz.n_qubits):
                states = apply_rotation_batch(states, q, axis, angles[:, layer, m, q])
        states = states * ent[None, :]
    return states


def pulse_stochastic_cost(
    final_state: np.ndarray,
    schedule: PulseSchedule,
    increments: np.ndarray,
    q_weight: float,
    r_weight: float,
    h_target: PauliSum,
) -> float:
    """(Q/2) <H> + (1/2) sum_k u_k.R u_k dt_k + (1/2) sum_k u_k.R dW_k."""
    dts = schedule.segment_lengths
    u = schedule.values
    fluence = 0.5 * r_weight * float(np.sum((u**2) * dts[:, None]))
    ito = 0.5 * r_weight * float(np.sum(u * increments))
    return 0.5 * q_weight * expectation(final_state, h_target) + fluence + ito


def gate_stochastic_cost(
    final_state: np.ndarray,
    params: np.ndarray,
    increments: np.ndarray,
    q_weight: float,
    r_weight: float,
    h_target: PauliSum,
) -> float:
    """(Q/2) <H> + (R/2) theta.theta + (R/2) theta.dW."""
    theta = np.asarray(params, dtype=float).ravel()
    dw = np.asarray(increments, dtype=float).ravel()
    return (
        0.5 * q_weight * expectation(final_state, h_target)
        + 0.5 * r_weight * float(theta @ theta)
        + 0.5 * r_weight * float(theta @ dw)
    )


def gate_stochastic_cost_batch(
    energies: np.ndarray,
    params: np.ndarray,
    noise_batch: np.ndarray,
    q_weight: float,
    r_weight: float,
) -> np.ndarray:
    theta = np.asarray(params, dtype=float).ravel()
    dw = noise_batch.reshape(noise_batch.shape[0], -1)
    return 0.5 * q_weight * energies + 0.5 * r_weight * (theta @ theta) + \
        0.5 * r_weight * (dw @ theta)
