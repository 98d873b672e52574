"""The six figure kinds, rendered from a completed harness run directory."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import ParseError, read_convergence, read_field, read_spectrum, read_vectorfield

MODELS = ("true", "classical", "qm", "fock")
EXTENT = (0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi)

KINDS = ("quiver", "spectrum", "eigenfunction", "evolution-panel",
         "error-panel", "convergence-curve")


@dataclass(frozen=True)
class FigureJob:
    input_dir: Path
    kind: str
    out_path: Path

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def _times(input_dir: Path, prefix: str) -> list[float]:
    pat = re.compile(rf"{prefix}_t(.+)\.csv$")
    ts = []
    for p in input_dir.iterdir():
        m = pat.match(p.name)
        if m:
            ts.append(float(m.group(1)))
    if not ts:
        raise ParseError(f"{input_dir}: no {prefix}_t*.csv files found")
    return sorted(ts)


def _fmt_t(t: float) -> str:
    return f"{t:g}"


def _render_quiver(input_dir: Path, ax) -> None:
    data = read_vectorfield(input_dir / "vectorfield.csv")
    ax.quiver(data[:, 0], data[:, 1], data[:, 2], data[:, 3],
              angles="xy", scale_units="xy")
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(0, 2 * np.pi)
    ax.set_xlabel(r"$\theta_1$")
    ax.set_ylabel(r"$\theta_2$")
    ax.set_title("vector field")


def _render_spectrum(input_dir: Path, fig, ax) -> None:
    data = read_spectrum(input_dir / "spectrum.csv")
    sc = ax.scatter(data[:, 1], data[:, 2], c=data[:, 2], s=12, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="Dirichlet energy")
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel("Dirichlet energy")
    ax.set_title(f"eigenfrequencies ({data.shape[0]} points)")


def _render_eigenfunction(input_dir: Path, fig, ax) -> None:
    candidates = sorted(input_dir.glob("eigenfunction_*.csv"))
    if not candidates:
        raise ParseError(f"{input_dir}: no eigenfunction_*.csv files found")
    field = read_field(candidates[0])
    im = ax.imshow(field.grid, origin="lower", extent=EXTENT, cmap="RdBu_r")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel(r"$\theta_1$")
    ax.set_ylabel(r"$\theta_2$")
    ax.set_title(f"Re {candidates[0].stem}")


def _render_panel(input_dir: Path, prefix: str, models, cmap: str):
    times = _times(input_dir, f"{prefix}_{models[0]}")
    nrows, ncols = len(models), len(times)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(2.6 * ncols + 1.2, 2.4 * nrows),
                             constrained_layout=True)
    for r, model in enumerate(models):
        fields = [read_field(input_dir / f"{prefix}_{model}_t{_fmt_t(t)}.csv")
                  for t in times]
        stack = np.stack([f.grid for f in fields])
        finite = stack[np.isfinite(stack)]
        vmin = float(finite.min()) if finite.size else 0.0
        vmax = float(finite.max()) if finite.size else 1.0
        if prefix == "error":
            vmax = max(abs(vmin), abs(vmax))
            vmin = -vmax
        if vmin == vmax:
            vmax = vmin + 1.0  # degenerate range: constant field
        im = None
        for c, f in enumerate(fields):
            ax = axes[r][c]
            im = ax.imshow(f.grid, origin="lower", extent=EXTENT,
                           vmin=vmin, vmax=vmax, cmap=cmap)
            ax.set_xticks([])
            ax.set_yticks([])
            if r == 0:
                ax.set_title(f"t = {_fmt_t(f.t)}")
            if c == 0:
                ax.set_ylabel(model)
        fig.colorbar(im, ax=[axes[r][c] for c in range(ncols)], shrink=0.85)
    return fig


def _render_convergence(input_dir: Path, ax) -> None:
    data = read_convergence(input_dir / "convergence.csv")
    ax.loglog(data[:, 0], data[:, 3], "o-")
    ax.invert_xaxis()
    ax.set_xlabel(r"$\epsilon$")
    ax.set_ylabel("max error")
    ax.set_title("convergence")
    ax.grid(True, which="both", alpha=0.3)


def render(job: FigureJob) -> Path:
    """Render one figure kind from a run directory; returns the output path."""
    input_dir = Path(job.input_dir)
    out = Path(job.out_path)
    if job.kind == "evolution-panel":
        fig = _render_panel(input_dir, "field", MODELS, "viridis")
    elif job.kind == "error-panel":
        fig = _render_panel(input_dir, "error", MODELS[1:], "RdBu_r")
    else:
        fig, ax = plt.subplots(figsize=(6.0, 4.8), constrained_layout=True)
        if job.kind == "quiver":
            _render_quiver(input_dir, ax)
        elif job.kind == "spectrum":
            _render_spectrum(input_dir, fig, ax)
        elif job.kind == "eigenfunction":
            _render_eigenfunction(input_dir, fig, ax)
        elif job.kind == "convergence-curve":
            _render_convergence(input_dir, ax)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
    return out
