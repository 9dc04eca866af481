"""Convergence figures from run traces.

Three panels, shared log-scale error axis: error vs parameter count,
vs CNOT count, vs cumulative shots.  Written next to the delimited
trace output so a benchmark run leaves both the data and the picture.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

ERROR_FLOOR = 1e-16  # keeps log axes finite when a run hits FCI exactly


def _label(records) -> str:
    r = records[0]
    tag = f"{r.method} {r.mode}"
    if r.mode == "finite":
        tag += f" S={r.shots_per_eval}"
    return tag


def convergence_figure(trace_sets, out_path: str, title: str | None = None) -> str:
    """Render error-vs-cost panels for one or more runs.

    trace_sets: list of IterationRecord lists (one per run).  Returns
    out_path for convenience.
    """
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharey=True)
    panels = (
        ("n_params", "parameters"),
        ("n_cnots", "CNOT gates"),
        ("cumulative_shots", "cumulative shots"),
    )
    for records in trace_sets:
        if not records:
            continue
        errs = [max(abs(r.error_vs_fci_hartree), ERROR_FLOOR) for r in records]
        for ax, (attr, _) in zip(axes, panels):
            ax.plot([getattr(r, attr) for r in records], errs, marker=".", label=_label(records))
    for ax, (_, xlabel) in zip(axes, panels):
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.grid(True, which="both", alpha=0.3)
    axes[0].set_ylabel("|E - E_FCI| (Hartree)")
    axes[0].legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
