"""Command line harness.

Subcommands::

    piqc run config.json --out-dir out [--seed S ...] [--plots]
    piqc sweep config.json problem1.json problem2.json ... --out-dir out
    piqc exact problem.json
    piqc compare-anneal config.json --out-dir out [--fixed-d D ...]

Exit codes: 0 success, 2 configuration error, 3 runtime divergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import bench
from .hamiltonians import ParseError, load_problem
from .operators import exact_ground_state
from .optimizers import DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _load_cfg(args, problem_override=None) -> bench.ExperimentConfig:
    cfg = bench.load_config(args.config, problem_override)
    if getattr(args, "seed", None):
        cfg = dataclasses.replace(cfg, seeds=tuple(args.seed))
    return cfg


def _cfg_echo(cfg: bench.ExperimentConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["seeds"] = list(cfg.seeds)
    echo["axes"] = list(cfg.axes)
    return echo


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    traces, agg = bench.run_experiment(cfg)
    written = bench.emit_outputs(args.out_dir, _cfg_echo(cfg), traces, agg)
    if args.plots:
        from . import plots

        for seed, trace in traces.items():
            written.append(plots.plot_trace(
                trace, agg.reference_energy,
                Path(args.out_dir) / f"trace_{trace.algorithm}_{seed}.png",
                title=f"{cfg.algorithm} seed {seed}",
            ))
    for path in written:
        print(path)
    print(f"median_error={agg.median_error:.6g} "
          f"min={agg.min_error:.6g} max={agg.max_error:.6g} "
          f"chemical_accuracy={'yes' if agg.chemical_accuracy_flag else 'no'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    problems = args.problems
    cfg = _load_cfg(args, problem_override=problems[0])
    results = bench.sweep(cfg, problems)
    written = bench.emit_sweep_outputs(args.out_dir, _cfg_echo(cfg), results)
    if args.plots:
        from . import plots

        written.append(plots.plot_sweep(results, Path(args.out_dir) / "sweep.png"))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_exact(args) -> int:
    h, metadata = load_problem(args.problem)
    spectrum = exact_ground_state(h)
    if metadata:
        print(f"metadata: {json.dumps(metadata)}")
    print(f"n_qubits: {h.n_qubits}")
    print(f"ground_energy: {spectrum.ground_energy:.12f}")
    print("eigenvalues:")
    for e in spectrum.eigenvalues:
        print(f"  {e:.12f}")
    return EXIT_OK


def cmd_compare_anneal(args) -> int:
    cfg = _load_cfg(args)
    columns = bench.compare_anneal(cfg, args.fixed_d)
    written = [bench.emit_compare_csv(args.out_dir, columns)]
    if args.plots:
        from . import plots

        written.append(plots.plot_compare(
            columns, Path(args.out_dir) / "compare_anneal.png"
        ))
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piqc",
        description="Path-integral quantum control benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="multi-seed run of one algorithm")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--seed", type=int, action="append",
                       help="override config seeds (repeatable)")
    p_run.add_argument("--plots", action="store_true",
                       help="render figures alongside the CSV output")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="one run per problem file")
    p_sweep.add_argument("config")
    p_sweep.add_argument("problems", nargs="+")
    p_sweep.add_argument("--out-dir", default="out")
    p_sweep.add_argument("--seed", type=int, action="append")
    p_sweep.add_argument("--plots", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_exact = sub.add_parser("exact", help="print the reference spectrum")
    p_exact.add_argument("problem")
    p_exact.set_defaults(func=cmd_exact)

    p_cmp = sub.add_parser("compare-anneal",
                           help="annealed vs fixed-D error traces")
    p_cmp.add_argument("config")
    p_cmp.add_argument("--out-dir", default="out")
    p_cmp.add_argument("--seed", type=int, action="append")
    p_cmp.add_argument("--fixed-d", type=float, action="append",
                       default=None,
                       help="fixed noise level (repeatable; default: "
                            "d_init, 1e-8, 1e-10, d_final)")
    p_cmp.add_argument("--plots", action="store_true")
    p_cmp.set_defaults(func=cmd_compare_anneal)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compare-anneal" and args.fixed_d is None:
        try:
            cfg = bench.load_config(args.config)
            sched, _ = bench._annealing_from_config(cfg)
            args.fixed_d = [sched.d_init, 1e-8, 1e-10, sched.d_final]
        except (bench.ConfigError, ParseError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return args.func(args)
    except (bench.ConfigError, ParseError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"runtime divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
