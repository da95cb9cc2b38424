"""Matplotlib rendering of the benchmark artifacts.

Figures are written next to the delimited output; the CSV/JSON files
remain the machine-readable contract.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import AggregateResult, CHEMICAL_ACCURACY
from .optimizers import OptimizationTrace

_ERR_FLOOR = 1e-16


def _clip_err(err: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(err, dtype=float), _ERR_FLOOR)


def plot_trace(trace: OptimizationTrace, reference_energy: float,
               path: str | Path, title: str = "") -> Path:
    """Energy-error evolution (min/mean/max) with the D schedule overlaid."""
    it = np.arange(trace.n_iterations)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(it, _clip_err(trace.e_min - reference_energy), label="min", lw=1.0)
    ax.semilogy(it, _clip_err(trace.e_mean - reference_energy), label="mean",
                lw=0.8, alpha=0.7)
    ax.semilogy(it, _clip_err(trace.e_max - reference_energy), label="max",
                lw=0.8, alpha=0.7)
    ax.axhline(CHEMICAL_ACCURACY, color="gray", ls="--", lw=0.8,
               label="chemical accuracy")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy error")
    if trace.d_values is not None:
        ax2 = ax.twinx()
        ax2.semilogy(it, trace.d_values, color="tab:red", ls=":", lw=1.0)
        ax2.set_ylabel("noise strength D", color="tab:red")
        ax2.tick_params(axis="y", colors="tab:red")
    ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(results: list[AggregateResult], path: str | Path) -> Path:
    """Median error with min-max range per sweep point."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    x = np.arange(len(results))
    med = _clip_err([r.median_error for r in results])
    lo = _clip_err([r.min_error for r in results])
    hi = _clip_err([r.max_error for r in results])
    ax.errorbar(x, med, yerr=[med - lo, hi - med], fmt="o", capsize=4)
    ax.set_yscale("log")
    ax.axhline(CHEMICAL_ACCURACY, color="gray", ls="--", lw=0.8,
               label="chemical accuracy")
    ax.set_xticks(x)
    ax.set_xticklabels([Path(r.problem_file).stem for r in results],
                       rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("final energy error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_compare(columns: dict[str, np.ndarray], path: str | Path) -> Path:
    """Annealed-vs-fixed-D error curves on one log axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, err in columns.items():
        ax.semilogy(_clip_err(err), label=name, lw=1.0)
    ax.axhline(CHEMICAL_ACCURACY, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("min-trajectory energy error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
