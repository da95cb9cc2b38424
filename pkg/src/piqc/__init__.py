"""Path-integral quantum control toolkit.

Adaptive-importance-sampling optimization of quantum controls, in pulse
form (piecewise-constant amplitudes driving a stochastic Schrodinger
equation) and gate form (randomized layered-ansatz angles), with an SPSA
baseline and a benchmark harness against exact diagonalization.
"""

from .operators import PauliSum, PauliTerm, Spectrum, exact_ground_state
from .statevector import (
    apply_diagonal_unitary,
    apply_pauli_term,
    apply_rotation,
    basis_state,
    expectation,
    fidelity,
    zero_state,
)
from .hamiltonians import (
    DriftSpec,
    build_drift_diagonal,
    build_tfim,
    load_problem,
    parse_pauli_sum,
    serialize_pauli_sum,
)
from .dynamics import (
    AnsatzSpec,
    NoiseRealization,
    PulseSchedule,
    TrajectoryRecord,
    gate_stochastic_cost,
    integrate_sse,
    pulse_stochastic_cost,
    run_randomized_circuit,
    sample_noise,
    uniform_schedule,
)
from .optimizers import (
    AISConfig,
    AnnealingSchedule,
    OptimizationTrace,
    SPSAConfig,
    ais_weights,
    annealing_value,
    run_piqc_gate,
    run_piqc_pulse,
    run_spsa,
    spsa_gradient_estimate,
)
from .lindblad import lindblad_propagate, pure_density, trace_distance

__version__ = "0.1.0"
