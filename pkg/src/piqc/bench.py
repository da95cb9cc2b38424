"""Benchmark harness: multi-seed runs, sweeps, aggregation and file output.

All numbers are written with 17 significant digits so that every emitted
double round-trips exactly; identical configs and seeds therefore produce
byte-identical CSV/JSON artifacts.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import AnsatzSpec, PulseSchedule, uniform_schedule
from .hamiltonians import build_drift_diagonal, drift_from_strength, load_problem
from .operators import PauliSum, exact_ground_state
from .optimizers import (
    AISConfig,
    AnnealingSchedule,
    OptimizationTrace,
    PIQC_D_INIT,
    PIQC_HYPERPARAMS,
    SPSAConfig,
    SPSA_HYPERPARAMS,
    run_piqc_gate,
    run_piqc_pulse,
    run_spsa,
)

CHEMICAL_ACCURACY = 1.6e-3

ALGORITHMS = ("piqc-gate", "piqc-pulse", "spsa")

DEFAULT_SEEDS = tuple(range(20))
QUICK_SEEDS = tuple(range(5))


class ConfigError(Exception):
    """Invalid experiment configuration (exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem_file: str
    algorithm: str
    seeds: tuple[int, ...]
    q_eval_budget: int
    layers: int = 9
    axes: tuple[str, ...] = ("Z", "X", "Z")
    tau_g: float = 1.0
    tau_v: float = 10.0
    v_strength: float = 0.1
    pulse_segments: int = 11
    sse_dt_divisor: int = 200
    optimizer: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if not self.seeds and self.seeds != ():
            raise ConfigError("seeds must be a list of integers")


def config_from_dict(doc: dict, problem_override: str | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    ansatz = doc.get("ansatz", {})
    pulse = doc.get("pulse", {})
    try:
        return ExperimentConfig(
            problem_file=problem_override or doc["problem"],
            algorithm=doc["algorithm"],
            seeds=tuple(int(s) for s in doc.get("seeds", QUICK_SEEDS)),
            q_eval_budget=int(doc["q_eval_budget"]),
            layers=int(ansatz.get("layers", 9)),
            axes=tuple(ansatz.get("axes", ("Z", "X", "Z"))),
            tau_g=float(ansatz.get("tau_g", 1.0)),
            tau_v=float(ansatz.get("tau_v", 10.0)),
            v_strength=float(ansatz.get("v_strength", 0.1)),
            pulse_segments=int(pulse.get("segments", 11)),
            sse_dt_divisor=int(pulse.get("dt_divisor", 200)),
            optimizer=dict(doc.get("optimizer", {})),
            workers=int(doc.get("workers", 1)),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, problem_override: str | None = None) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    return config_from_dict(doc, problem_override)


def build_ansatz(cfg: ExperimentConfig, n_qubits: int) -> AnsatzSpec:
    drift = build_drift_diagonal(drift_from_strength(n_qubits, cfg.v_strength))
    return AnsatzSpec(
        n_qubits=n_qubits,
        n_layers=cfg.layers,
        axes=cfg.axes,
        entangler_phases=drift * cfg.tau_v,
        tau_v=cfg.tau_v,
        tau_g=cfg.tau_g,
    )


def build_pulse_schedule(cfg: ExperimentConfig, n_qubits: int) -> PulseSchedule:
    # pulse horizon matches a gate run of the same depth: T = L (tau_g + tau_v)
    horizon = cfg.layers * (cfg.tau_g + cfg.tau_v)
    return uniform_schedule(n_qubits, cfg.pulse_segments, horizon)


def _annealing_from_config(cfg: ExperimentConfig) -> tuple[AnnealingSchedule, AISConfig]:
    opt = dict(cfg.optimizer)
    molecule = opt.pop("molecule", None)
    if molecule is not None:
        if molecule not in PIQC_HYPERPARAMS:
            raise ConfigError(f"no published PiQC hyperparameters for {molecule!r}")
        table = PIQC_HYPERPARAMS[molecule]
        opt.setdefault("d_init", PIQC_D_INIT)
        opt.setdefault("d_final", table["d_final"])
        opt.setdefault("n_d", table["n_d"])
        opt.setdefault("n_s", table["n_s"])
    try:
        sched = AnnealingSchedule(
            d_init=float(opt["d_init"]), d_final=float(opt["d_final"]),
            n_d=int(opt["n_d"]), n_s=int(opt["n_s"]),
        )
        ais = AISConfig(
            q_weight=float(opt.get("q_weight", 2.0e4)),
            r_weight=float(opt.get("r_weight", 1.0)),
            n_traj=int(opt.get("n_traj", 10)),
        )
    except KeyError as exc:
        raise ConfigError(f"missing optimizer field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sched, ais


def _spsa_from_config(cfg: ExperimentConfig) -> SPSAConfig:
    opt = dict(cfg.optimizer)
    molecule = opt.pop("molecule", None)
    if molecule is not None:
        if molecule not in SPSA_HYPERPARAMS:
            raise ConfigError(f"no published SPSA hyperparameters for {molecule!r}")
        a, c = SPSA_HYPERPARAMS[molecule]
        opt.setdefault("a", a)
        opt.setdefault("c", c)
    try:
        iterations = int(opt.get("iterations", cfg.q_eval_budget // 2))
        return SPSAConfig(
            learning_rate=float(opt["a"]), perturbation=float(opt["c"]),
            iterations=iterations,
        )
    except KeyError as exc:
        raise ConfigError(f"missing optimizer field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def planned_evaluations(cfg: ExperimentConfig) -> int:
    """Exact evaluation count the configured run will consume per seed."""
    if cfg.algorithm == "spsa":
        return 2 * _spsa_from_config(cfg).iterations
    sched, ais = _annealing_from_config(cfg)
    return ais.n_traj * sched.n_s * sched.n_d


def check_budget(cfg: ExperimentConfig) -> None:
    planned = planned_evaluations(cfg)
    if planned != cfg.q_eval_budget:
        raise ConfigError(
            f"{cfg.algorithm} consumes {planned} evaluations per seed but "
            f"q_eval_budget = {cfg.q_eval_budget}; budgets must match exactly"
        )


def check_equal_budgets(configs: list[ExperimentConfig]) -> None:
    """Refuse a comparison unless every algorithm spends the same budget."""
    budgets = {c.algorithm: planned_evaluations(c) for c in configs}
    if len(set(budgets.values())) > 1:
        raise ConfigError(f"unequal evaluation budgets across algorithms: {budgets}")
    for c in configs:
        check_budget(c)


@dataclass(frozen=True)
class AggregateResult:
    problem_file: str
    algorithm: str
    reference_energy: float
    seed_errors: dict[int, float]
    median_error: float
    min_error: float
    max_error: float
    chemical_accuracy_flag: bool
    metadata: dict = field(default_factory=dict)


def aggregate_errors(problem_file: str, algorithm: str, reference_energy: float,
                     seed_errors: dict[int, float], metadata: dict) -> AggregateResult:
    errs = np.array(list(seed_errors.values()), dtype=float)
    if len(errs) == 0:
        med = mn = mx = float("nan")
        flag = False
    else:
        med, mn, mx = float(np.median(errs)), float(errs.min()), float(errs.max())
        flag = mx < CHEMICAL_ACCURACY
    return AggregateResult(
        problem_file=problem_file, algorithm=algorithm,
        reference_energy=reference_energy, seed_errors=dict(seed_errors),
        median_error=med, min_error=mn, max_error=mx,
        chemical_accuracy_flag=flag, metadata=metadata,
    )


def reference_ground_energy(h: PauliSum, metadata: dict) -> float:
    ref = metadata.get("reference_ground_energy")
    if ref is not None:
        return float(ref)
    return exact_ground_state(h).ground_energy


def run_single_seed(cfg: ExperimentConfig, h: PauliSum, seed: int) -> OptimizationTrace:
    if cfg.algorithm == "spsa":
        spsa_cfg = _spsa_from_config(cfg)
        spsa_cfg = SPSAConfig(
            learning_rate=spsa_cfg.learning_rate,
            perturbation=spsa_cfg.perturbation,
            iterations=spsa_cfg.iterations, master_seed=seed,
        )
        return run_spsa(h, build_ansatz(cfg, h.n_qubits), spsa_cfg)
    sched, ais = _annealing_from_config(cfg)
    ais = AISConfig(q_weight=ais.q_weight, r_weight=ais.r_weight,
                    n_traj=ais.n_traj, master_seed=seed)
    if cfg.algorithm == "piqc-gate":
        return run_piqc_gate(h, build_ansatz(cfg, h.n_qubits), sched, ais)
    schedule = build_pulse_schedule(cfg, h.n_qubits)
    drift = build_drift_diagonal(drift_from_strength(h.n_qubits, cfg.v_strength))
    return run_piqc_pulse(h, schedule, drift, sched, ais,
                          sse_dt_divisor=cfg.sse_dt_divisor)


def run_experiment(cfg: ExperimentConfig) -> tuple[dict[int, OptimizationTrace], AggregateResult]:
    """Run every seed independently; returns per-seed traces + aggregate."""
    check_budget(cfg)
    h, metadata = load_problem(cfg.problem_file)
    e_ref = reference_ground_energy(h, metadata)

    def one(seed: int) -> OptimizationTrace:
        return run_single_seed(cfg, h, seed)

    if cfg.workers > 1 and len(cfg.seeds) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            traces = dict(zip(cfg.seeds, pool.map(one, cfg.seeds)))
    else:
        traces = {seed: one(seed) for seed in cfg.seeds}
    seed_errors = {s: t.final_energy - e_ref for s, t in traces.items()}
    agg = aggregate_errors(cfg.problem_file, cfg.algorithm, e_ref, seed_errors,
                           metadata)
    return traces, agg


def sweep(cfg: ExperimentConfig, problem_files: list[str]) -> list[AggregateResult]:
    """One AggregateResult per problem file; parse failures abort up front."""
    if not problem_files:
        raise ConfigError("sweep needs at least one problem file")
    for path in problem_files:
        load_problem(path)
    results = []
    for path in problem_files:
        sub = ExperimentConfig(**{**cfg.__dict__, "problem_file": path})
        _, agg = run_experiment(sub)
        results.append(agg)
    return results


def compare_anneal(
    cfg: ExperimentConfig, fixed_d_values: list[float], seed: int | None = None
) -> dict[str, np.ndarray]:
    """Per-iteration min-energy error, annealed vs fixed-D runs of equal
    total iteration count.  Keys: 'annealed' and 'fixed_<D>'."""
    check_budget(cfg)
    h, metadata = load_problem(cfg.problem_file)
    e_ref = reference_ground_energy(h, metadata)
    sched, ais = _annealing_from_config(cfg)
    if seed is None:
        seed = cfg.seeds[0] if cfg.seeds else 0
    ais = AISConfig(q_weight=ais.q_weight, r_weight=ais.r_weight,
                    n_traj=ais.n_traj, master_seed=seed)
    ansatz = build_ansatz(cfg, h.n_qubits)
    total_iters = sched.n_d * sched.n_s

    out: dict[str, np.ndarray] = {}
    trace = run_piqc_gate(h, ansatz, sched, ais)
    out["annealed"] = trace.e_min - e_ref
    for d_fixed in fixed_d_values:
        fixed_sched = AnnealingSchedule(
            d_init=d_fixed, d_final=d_fixed, n_d=1, n_s=total_iters
        )
        trace = run_piqc_gate(h, ansatz, fixed_sched, ais)
        out[f"fixed_{d_fixed:g}"] = trace.e_min - e_ref
    return out


# ---------------------------------------------------------------------------
# output files


def _num17(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if not np.isfinite(xf):
        return "null"
    return format(xf, ".17g")


def dumps_17g(obj, indent: int = 0) -> str:
    """JSON text with every float at 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _num17(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_17g(v, indent + 2)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{dumps_17g(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def trace_csv_text(trace: OptimizationTrace) -> str:
    lines = ["iteration,D,energy_min,energy_mean,energy_max,q_eval"]
    for i in range(trace.n_iterations):
        d_txt = "" if trace.d_values is None else _num17(trace.d_values[i])
        lines.append(
            f"{i},{d_txt},{_num17(trace.e_min[i])},{_num17(trace.e_mean[i])},"
            f"{_num17(trace.e_max[i])},{int(trace.q_eval[i])}"
        )
    return "\n".join(lines) + "\n"


def emit_outputs(
    out_dir: str | Path,
    cfg_echo: dict,
    traces: dict[int, OptimizationTrace],
    aggregate: AggregateResult,
) -> list[Path]:
    """Write per-run CSVs and the summary JSON; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for seed, trace in traces.items():
        path = out_dir / f"trace_{trace.algorithm}_{seed}.csv"
        path.write_text(trace_csv_text(trace))
        written.append(path)
    summary = {
        "config": cfg_echo,
        "reference_energy": aggregate.reference_energy,
        "problem_metadata": aggregate.metadata,
        "results": [
            {
                "seed": seed,
                "final_energy": traces[seed].final_energy,
                "deterministic_final_energy":
                    traces[seed].deterministic_final_energy,
                "error": aggregate.seed_errors[seed],
                "q_eval_total": int(traces[seed].q_eval[-1]),
            }
            for seed in traces
        ],
        "aggregate": {
            "median_error": aggregate.median_error,
            "min_error": aggregate.min_error,
            "max_error": aggregate.max_error,
            "chemical_accuracy_flag": aggregate.chemical_accuracy_flag,
        },
    }
    path = out_dir / "summary.json"
    path.write_text(dumps_17g(summary) + "\n")
    written.append(path)
    return written


def emit_sweep_outputs(out_dir: str | Path, cfg_echo: dict,
                       results: list[AggregateResult]) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["problem,algorithm,reference_energy,median_error,min_error,"
             "max_error,chemical_accuracy"]
    for r in results:
        lines.append(
            f"{r.problem_file},{r.algorithm},{_num17(r.reference_energy)},"
            f"{_num17(r.median_error)},{_num17(r.min_error)},"
            f"{_num17(r.max_error)},{str(r.chemical_accuracy_flag).lower()}"
        )
    csv_path = out_dir / "sweep.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    summary = {
        "config": cfg_echo,
        "rows": [
            {
                "problem": r.problem_file,
                "algorithm": r.algorithm,
                "reference_energy": r.reference_energy,
                "seed_errors": {str(k): v for k, v in r.seed_errors.items()},
                "median_error": r.median_error,
                "min_error": r.min_error,
                "max_error": r.max_error,
                "chemical_accuracy_flag": r.chemical_accuracy_flag,
                "metadata": r.metadata,
            }
            for r in results
        ],
    }
    json_path = out_dir / "sweep_summary.json"
    json_path.write_text(dumps_17g(summary) + "\n")
    return [csv_path, json_path]


def emit_compare_csv(out_dir: str | Path, columns: dict[str, np.ndarray]) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    n_rows = len(next(iter(columns.values())))
    lines = ["iteration," + ",".join(names)]
    for i in range(n_rows):
        lines.append(str(i) + "," + ",".join(_num17(columns[c][i]) for c in names))
    path = out_dir / "compare_anneal.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
