"""Output writers: delimited data, diagnostics JSON, and rendered figures."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .grid import Grid
from .series import GridVectorFunction, SeriesSolution


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_solution_csv(path: Path, fn: GridVectorFunction) -> None:
    n = fn.values.shape[1]
    lines = ["x," + ",".join(f"y{i + 1}" for i in range(n))]
    for x, row in zip(fn.grid.nodes, fn.values):
        lines.append(",".join([_fmt(x)] + [_fmt(v) for v in row]))
    path.write_text("\n".join(lines) + "\n")


def write_terms_csv(path: Path, terms: Sequence[GridVectorFunction]) -> None:
    n = terms[0].values.shape[1]
    lines = ["x,term," + ",".join(f"y{i + 1}" for i in range(n))]
    for j, term in enumerate(terms):
        for x, row in zip(term.grid.nodes, term.values):
            lines.append(",".join([_fmt(x), str(j)] + [_fmt(v) for v in row]))
    path.write_text("\n".join(lines) + "\n")


def write_diagnostics_json(
    path: Path, solution: SeriesSolution, grid: Grid, elapsed_ms: float
) -> None:
    payload = {
        "stop_reason": solution.stop_reason.value,
        "n_terms": len(solution.terms),
        "term_sup_norms": solution.term_sup_norms,
        "residual_sup": solution.residual_sup,
        "grid_nodes": grid.n_nodes,
        "elapsed_ms": elapsed_ms,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_plot_data(path: Path, terms: Sequence[GridVectorFunction]) -> None:
    """gnuplot-convention blocks: one per term, blank-line separated."""
    blocks = []
    for term in terms:
        lines = [
            " ".join([_fmt(x)] + [_fmt(v) for v in row])
            for x, row in zip(term.grid.nodes, term.values)
        ]
        blocks.append("\n".join(lines))
    path.write_text("\n\n".join(blocks) + "\n")


def render_figures(outdir: Path, solution: SeriesSolution) -> list[Path]:
    """Solution components and the term-norm decay, as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fn = solution.partial_sum
    nodes = fn.grid.nodes
    n = fn.values.shape[1]
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i in range(n):
        ax.plot(nodes, fn.values[:, i], label=f"y{i + 1}")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("series solution")
    ax.legend()
    ax.grid(True, alpha=0.3)
    path = outdir / "solution.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogy(range(len(solution.term_sup_norms)), solution.term_sup_norms, "o-")
    ax.set_xlabel("term index")
    ax.set_ylabel("sup norm")
    ax.set_title(f"term norms ({solution.stop_reason.value})")
    ax.grid(True, which="both", alpha=0.3)
    path = outdir / "term-norms.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    return written
