"""Adaptive-importance-sampling control optimization and the SPSA baseline.

The AIS optimizer anneals the trajectory noise strength D geometrically
from d_init to d_final; at each noise level it repeatedly samples noisy
trajectories under the current controls, weights them by a Boltzmann
factor of their stochastic cost (temperature lambda = R * D, an identity
enforced here, never a free parameter), and shifts the controls by the
weighted mean noise.  SPSA is the fixed-hyperparameter two-evaluation
stochastic gradient method used as the comparison baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    AnsatzSpec,
    NoiseRealization,
    PulseSchedule,
    aggregate_path_to_segments,
    gate_stochastic_cost_batch,
    integrate_sse,
    integrate_sse_batch,
    pulse_stochastic_cost,
    run_randomized_circuit,
    run_randomized_circuit_batch,
    sample_noise,
    sample_wiener_path,
    trajectory_rng,
)
from .operators import PauliSum
from .statevector import expectation, expectation_batch, zero_state

# stream ids: parameter init gets a reserved stream; AIS step p uses
# streams p * _STREAM_STRIDE + traj_index + 1, so every trajectory owns an
# independent counter-based RNG stream.
_INIT_STREAM = 0
_STREAM_STRIDE = 1 << 20

CONTROL_DIVERGENCE_LIMIT = 1e6

# published fixed (a, c) pairs per molecule
SPSA_HYPERPARAMS = {
    "H2": (0.001, 0.00005),
    "LiH": (0.01, 0.0005),
    "BeH2": (0.001, 0.00005),
    "H4": (0.001, 0.00005),
}

# published noise-schedule hyperparameters per molecule (d_init is common)
PIQC_D_INIT = 2.5e-5
PIQC_HYPERPARAMS = {
    "H2": {"n_s": 100, "n_d": 64, "d_final": 5e-16},
    "LiH": {"n_s": 400, "n_d": 64, "d_final": 5e-16},
    "BeH2": {"n_s": 800, "n_d": 32, "d_final": 5e-13},
    "H4": {"n_s": 800, "n_d": 32, "d_final": 5e-13},
}


class DivergenceError(Exception):
    """Controls or costs became non-finite; carries the trace so far."""

    def __init__(self, message: str, trace: "OptimizationTrace | None" = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class AnnealingSchedule:
    d_init: float
    d_final: float
    n_d: int
    n_s: int

    def __post_init__(self):
        if self.d_init <= 0 or self.d_final <= 0:
            raise ValueError("noise levels must be > 0")
        if self.n_d < 1 or self.n_s < 1:
            raise ValueError("n_d and n_s must be >= 1")


@dataclass(frozen=True)
class AISConfig:
    q_weight: float = 2.0e4
    r_weight: float = 1.0
    n_traj: int = 10
    master_seed: int = 0

    def __post_init__(self):
        if self.q_weight <= 0 or self.r_weight <= 0:
            raise ValueError("Q and R must be > 0")
        if self.n_traj < 2:
            raise ValueError("need at least 2 trajectories")


@dataclass(frozen=True)
class SPSAConfig:
    learning_rate: float
    perturbation: float
    iterations: int
    master_seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0 or self.perturbation <= 0:
            raise ValueError("learning rate must be >= 0 and perturbation > 0")


@dataclass
class OptimizationTrace:
    """Per-iteration diagnostics plus the final controls and energies.

    ``d_values`` is None for SPSA.  ``final_energy`` is the minimum
    trajectory energy of the last AIS step (lowest index wins ties);
    ``deterministic_final_energy`` evaluates the noise-free controls.
    """

    algorithm: str
    e_min: np.ndarray
    e_mean: np.ndarray
    e_max: np.ndarray
    q_eval: np.ndarray
    d_values: np.ndarray | None
    r_weight: float | None
    final_controls: np.ndarray
    final_energy: float
    deterministic_final_energy: float

    @property
    def n_iterations(self) -> int:
        return len(self.e_min)

    @property
    def lambda_values(self) -> np.ndarray | None:
        # lambda = R * D at every AIS step, by construction
        if self.d_values is None:
            return None
        return self.r_weight * self.d_values


def annealing_value(j: int, sched: AnnealingSchedule) -> float:
    """Exponential schedule D_j = d_init * (d_final/d_init)^(j/(n_d-1))."""
    if not 0 <= j < sched.n_d:
        raise ValueError(f"annealing index {j} out of range [0, {sched.n_d})")
    if sched.n_d == 1:
        return sched.d_init
    return sched.d_init * (sched.d_final / sched.d_init) ** (j / (sched.n_d - 1))


def ais_weights(costs: np.ndarray, lam: float) -> np.ndarray:
    """Normalized importance weights exp(-S/lambda), max-shifted.

    The shift cancels in the normalization, so this is mathematically the
    Boltzmann weight but safe when S/lambda spans hundreds of units.  The
    1/N of the empirical expectation is absorbed: weights sum to one and
    sum_i w_i x_i estimates E[w x].
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 1 or len(costs) < 1:
        raise ValueError("costs must be a non-empty 1-D array")
    if not np.all(np.isfinite(costs)):
        raise ValueError("non-finite stochastic cost")
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    logw = -(costs - costs.min()) / lam
    w = np.exp(logw)
    return w / w.sum()


def ais_update_gate(
    params: np.ndarray, noise_batch: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """theta' = theta + sum_i w_i DeltaW_i (unit gate intervals)."""
    if noise_batch.shape[1:] != params.shape:
        raise ValueError(
            f"noise shape {noise_batch.shape[1:]} != params shape {params.shape}"
        )
    return params + np.tensordot(weights, noise_batch, axes=(0, 0))


def ais_update_pulse(
    schedule: PulseSchedule, increments_batch: np.ndarray, weights: np.ndarray
) -> PulseSchedule:
    """u' = u + sum_i w_i DeltaW_i / dt_k (indicator-basis B matrix is
    the diagonal of segment lengths)."""
    if increments_batch.shape[1:] != schedule.values.shape:
        raise ValueError(
            f"noise shape {increments_batch.shape[1:]} != control shape "
            f"{schedule.values.shape}"
        )
    mean_dw = np.tensordot(weights, increments_batch, axes=(0, 0))
    return schedule.with_values(
        schedule.values + mean_dw / schedule.segment_lengths[:, None]
    )


def _check_finite(values: np.ndarray, what: str, trace_parts) -> None:
    if not np.all(np.isfinite(values)) or np.abs(values).max() > CONTROL_DIVERGENCE_LIMIT:
        raise DivergenceError(f"{what} diverged", trace=_partial_trace(*trace_parts))


def _partial_trace(algorithm, e_min, e_mean, e_max, q_eval, d_values, r_weight,
                   controls):
    return OptimizationTrace(
        algorithm=algorithm,
        e_min=np.array(e_min), e_mean=np.array(e_mean), e_max=np.array(e_max),
        q_eval=np.array(q_eval, dtype=int),
        d_values=np.array(d_values) if d_values is not None else None,
        r_weight=r_weight,
        final_controls=np.array(controls),
        final_energy=float("nan"),
        deterministic_final_energy=float("nan"),
    )


def run_piqc_gate(
    h_target: PauliSum,
    ansatz: AnsatzSpec,
    sched: AnnealingSchedule,
    cfg: AISConfig,
    psi0: np.ndarray | None = None,
    initial_params: np.ndarray | None = None,
) -> OptimizationTrace:
    """Gate-based PiQC: anneal D, randomize circuit angles, AIS-update."""
    if h_target.n_qubits != ansatz.n_qubits:
        raise ValueError("problem and ansatz qubit counts differ")
    if psi0 is None:
        psi0 = zero_state(ansatz.n_qubits)
    if initial_params is None:
        init_rng = trajectory_rng(cfg.master_seed, _INIT_STREAM)
        params = init_rng.uniform(-2 * np.pi, 2 * np.pi, size=ansatz.param_shape)
    else:
        params = np.array(initial_params, dtype=float)
        if params.shape != ansatz.param_shape:
            raise ValueError("initial parameter shape mismatch")

    e_min, e_mean, e_max, q_eval, d_values = [], [], [], [], []
    q_total = 0
    step_index = 0
    final_energies = None
    for j in range(sched.n_d):
        d_j = annealing_value(j, sched)
        lam = cfg.r_weight * d_j
        for _ in range(sched.n_s):
            noise_batch = np.stack([
                sample_noise(
                    ansatz.param_shape, d_j,
                    trajectory_rng(cfg.master_seed,
                                   step_index * _STREAM_STRIDE + i + 1),
                ).increments
                for i in range(cfg.n_traj)
            ])
            states = run_randomized_circuit_batch(psi0, ansatz, params, noise_batch)
            energies = expectation_batch(states, h_target)
            costs = gate_stochastic_cost_batch(
                energies, params, noise_batch, cfg.q_weight, cfg.r_weight
            )
            trace_parts = ("piqc-gate", e_min, e_mean, e_max, q_eval, d_values,
                           cfg.r_weight, params)
            _check_finite(costs, "stochastic cost", trace_parts)
            weights = ais_weights(costs, lam)
            params = ais_update_gate(params, noise_batch, weights)
            _check_finite(params, "circuit parameters", trace_parts)
            q_total += cfg.n_traj
            e_min.append(energies.min())
            e_mean.append(energies.mean())
            e_max.append(energies.max())
            q_eval.append(q_total)
            d_values.append(d_j)
            final_energies = energies
            step_index += 1

    det_state = run_randomized_circuit(
        psi0, ansatz, params, NoiseRealization(np.zeros(ansatz.param_shape))
    )
    return OptimizationTrace(
        algorithm="piqc-gate",
        e_min=np.array(e_min), e_mean=np.array(e_mean), e_max=np.array(e_max),
        q_eval=np.array(q_eval, dtype=int),
        d_values=np.array(d_values), r_weight=cfg.r_weight,
        final_controls=params,
        final_energy=float(final_energies[int(np.argmin(final_energies))]),
        deterministic_final_energy=expectation(det_state, h_target),
    )


def run_piqc_pulse(
    h_target: PauliSum,
    schedule: PulseSchedule,
    drift_diag: np.ndarray,
    sched: AnnealingSchedule,
    cfg: AISConfig,
    psi0: np.ndarray | None = None,
    sse_dt_divisor: int = 200,
) -> OptimizationTrace:
    """Pulse-based PiQC: SSE trajectories, segment-aggregated increments."""
    if psi0 is None:
        psi0 = zero_state(h_target.n_qubits)
    dt = float(schedule.segment_lengths.min()) / sse_dt_divisor
    n_steps = int(np.rint(schedule.horizon / dt))

    e_min, e_mean, e_max, q_eval, d_values = [], [], [], [], []
    q_total = 0
    step_index = 0
    final_energies = None
    for j in range(sched.n_d):
        d_j = annealing_value(j, sched)
        lam = cfg.r_weight * d_j
        for _ in range(sched.n_s):
            costs = np.empty(cfg.n_traj)
            dw_batch = np.empty((cfg.n_traj,) + schedule.values.shape)
            paths = np.empty((cfg.n_traj, n_steps, schedule.n_channels))
            for i in range(cfg.n_traj):
                rng = trajectory_rng(
                    cfg.master_seed, step_index * _STREAM_STRIDE + i + 1
                )
                paths[i] = sample_wiener_path(
                    n_steps, schedule.n_channels, d_j, dt, rng
                )
                dw_batch[i] = aggregate_path_to_segments(paths[i], dt, schedule)
            states = integrate_sse_batch(psi0, drift_diag, schedule, paths, dt)
            energies = expectation_batch(states, h_target)
            for i in range(cfg.n_traj):
                costs[i] = pulse_stochastic_cost(
                    states[i], schedule, dw_batch[i], cfg.q_weight, cfg.r_weight,
                    h_target,
                )
            trace_parts = ("piqc-pulse", e_min, e_mean, e_max, q_eval, d_values,
                           cfg.r_weight, schedule.values)
            _check_finite(costs, "stochastic cost", trace_parts)
            weights = ais_weights(costs, lam)
            schedule = ais_update_pulse(schedule, dw_batch, weights)
            _check_finite(schedule.values, "pulse amplitudes", trace_parts)
            q_total += cfg.n_traj
            e_min.append(energies.min())
            e_mean.append(energies.mean())
            e_max.append(energies.max())
            q_eval.append(q_total)
            d_values.append(d_j)
            final_energies = energies
            step_index += 1

    det_psi = integrate_sse(
        psi0, drift_diag, schedule, np.zeros((n_steps, schedule.n_channels)), dt
    )
    return OptimizationTrace(
        algorithm="piqc-pulse",
        e_min=np.array(e_min), e_mean=np.array(e_mean), e_max=np.array(e_max),
        q_eval=np.array(q_eval, dtype=int),
        d_values=np.array(d_values), r_weight=cfg.r_weight,
        final_controls=schedule.values,
        final_energy=float(final_energies[int(np.argmin(final_energies))]),
        deterministic_final_energy=expectation(det_psi, h_target),
    )


def spsa_gradient_estimate(energy_fn, theta: np.ndarray, c: float,
                           delta: np.ndarray) -> np.ndarray:
    """Two-evaluation estimate (E(theta+c d) - E(theta-c d))/(2c) * 1/d.

    The element-wise inverse of a Rademacher vector is itself.
    """
    if c <= 0:
        raise ValueError("perturbation c must be > 0")
    delta = np.asarray(delta, dtype=float)
    if not np.all(np.abs(delta) == 1):
        raise ValueError("delta entries must be +1 or -1")
    diff = energy_fn(theta + c * delta) - energy_fn(theta - c * delta)
    return (diff / (2.0 * c)) * delta


def run_spsa(
    h_target: PauliSum,
    ansatz: AnsatzSpec,
    cfg: SPSAConfig,
    psi0: np.ndarray | None = None,
    initial_params: np.ndarray | None = None,
) -> OptimizationTrace:
    """Fixed-(a, c) SPSA on the deterministic circuit energy."""
    if h_target.n_qubits != ansatz.n_qubits:
        raise ValueError("problem and ansatz qubit counts differ")
    if psi0 is None:
        psi0 = zero_state(ansatz.n_qubits)
    zero_noise = NoiseRealization(np.zeros(ansatz.param_shape))

    def energy_fn(theta_flat: np.ndarray) -> float:
        state = run_randomized_circuit(
            psi0, ansatz, theta_flat.reshape(ansatz.param_shape), zero_noise
        )
        return expectation(state, h_target)

    if initial_params is None:
        init_rng = trajectory_rng(cfg.master_seed, _INIT_STREAM)
        theta = init_rng.uniform(-2 * np.pi, 2 * np.pi, size=ansatz.n_params)
    else:
        theta = np.array(initial_params, dtype=float).ravel()
        if theta.shape != (ansatz.n_params,):
            raise ValueError("initial parameter shape mismatch")

    e_trace, q_eval = [], []
    q_total = 0
    for it in range(cfg.iterations):
        rng = trajectory_rng(cfg.master_seed, it * _STREAM_STRIDE + 1)
        delta = rng.integers(0, 2, size=theta.shape) * 2 - 1
        grad = spsa_gradient_estimate(energy_fn, theta, cfg.perturbation, delta)
        theta = theta - cfg.learning_rate * grad
        q_total += 2
        e_trace.append(energy_fn(theta))
        q_eval.append(q_total)

    e_arr = np.array(e_trace) if e_trace else np.array([energy_fn(theta)])
    final_energy = energy_fn(theta)
    return OptimizationTrace(
        algorithm="spsa",
        e_min=e_arr.copy(), e_mean=e_arr.copy(), e_max=e_arr.copy(),
        q_eval=np.array(q_eval, dtype=int) if q_eval else np.zeros(1, dtype=int),
        d_values=None, r_weight=None,
        final_controls=theta,
        final_energy=final_energy,
        deterministic_final_energy=final_energy,
    )
