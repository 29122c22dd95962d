"""Figure construction. One FigureSpec in, one image file out."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import SCHEMAS, SchemaError, read_csv

KINDS = ("histogram", "heatmap", "grid-pair", "curves")

_KIND_SCHEMA = {
    "histogram": "histogram",
    "heatmap": "sweep",
    "grid-pair": "phase",
    "curves": "trace",
}


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    output: str
    kind: str  # histogram | heatmap | grid-pair | curves
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    log_y: bool | None = None  # None -> per-kind default
    labels: tuple[str, ...] = field(default=())  # curve labels, one per input

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")
        if self.kind != "curves" and len(self.inputs) != 1:
            raise SchemaError(f"kind {self.kind!r} takes exactly one input CSV")
        if self.labels and len(self.labels) != len(self.inputs):
            raise SchemaError("need one label per input")


def render(spec: FigureSpec) -> Path:
    """Validate the input CSV(s) and write the figure; returns the image path."""
    schema = SCHEMAS[_KIND_SCHEMA[spec.kind]]
    tables = [read_csv(p, schema) for p in spec.inputs]
    fig = _BUILDERS[spec.kind](spec, tables)
    if spec.title:
        fig.suptitle(spec.title)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def _histogram(spec: FigureSpec, tables) -> plt.Figure:
    rows = tables[0]
    sections = [k for k in ("weight", "frequency") if any(r["kind"] == k for r in rows)]
    if not sections:
        raise SchemaError("histogram CSV has no weight or frequency rows")
    fig, axes = plt.subplots(1, len(sections), figsize=(5 * len(sections), 4))
    axes = np.atleast_1d(axes)
    for ax, section in zip(axes, sections):
        sel = sorted((r for r in rows if r["kind"] == section), key=lambda r: r["bin"])
        bins = [r["bin"] for r in sel]
        total = [r["count"] for r in sel]
        surviving = [r["surviving"] for r in sel]
        x = np.arange(len(bins))
        ax.bar(x - 0.2, total, width=0.4, color="0.6", label="all terms")
        ax.bar(x + 0.2, surviving, width=0.4, color="tab:blue", label="surviving")
        ax.set_xticks(x, [str(b) for b in bins])
        ax.set_xlabel(spec.xlabel or section)
        ax.set_ylabel(spec.ylabel or "terms")
        if spec.log_y is not False:
            ax.set_yscale("log")
        ax.legend()
    return fig


def _axis_order(values):
    """Sort cutoff labels numerically with 'full' last."""
    def key(v):
        return (1, 0) if v == "full" else (0, int(v))

    return sorted(set(values), key=key)


def _heatmap(spec: FigureSpec, tables) -> plt.Figure:
    rows = tables[0]
    w_vals = _axis_order(r["w_cut"] for r in rows)
    nu_vals = _axis_order(r["nu_cut"] for r in rows)
    mae = np.full((len(w_vals), len(nu_vals)), np.nan)
    bound = np.full_like(mae, np.nan)
    for r in rows:
        i = w_vals.index(r["w_cut"])
        j = nu_vals.index(r["nu_cut"])
        mae[i, j] = r["mae"]
        if r["bound"] is not None:
            bound[i, j] = r["bound"]

    fig, ax = plt.subplots(figsize=(6, 5))
    from matplotlib.colors import LogNorm

    positive = mae[np.isfinite(mae) & (mae > 0)]
    norm = LogNorm(vmin=positive.min(), vmax=positive.max()) if positive.size else None
    im = ax.imshow(mae, origin="lower", aspect="auto", cmap="viridis", norm=norm)
    fig.colorbar(im, ax=ax, label="mean absolute error")
    if np.isfinite(bound).any():
        # transparent red overlay scaled by the theoretical bound
        finite = np.nan_to_num(bound, nan=0.0)
        alpha = np.clip(finite / max(finite.max(), 1e-300), 0.0, 1.0) * 0.45
        ax.imshow(
            np.ones_like(bound), origin="lower", aspect="auto",
            cmap="Reds", vmin=0, vmax=1, alpha=alpha,
        )
    ax.set_xticks(range(len(nu_vals)), [str(v) for v in nu_vals])
    ax.set_yticks(range(len(w_vals)), [str(v) for v in w_vals])
    ax.set_xlabel(spec.xlabel or "frequency cutoff")
    ax.set_ylabel(spec.ylabel or "weight cutoff")
    return fig


def _grid_pair(spec: FigureSpec, tables) -> plt.Figure:
    rows = tables[0]
    kappas = sorted({r["kappa"] for r in rows})
    hs = sorted({r["h"] for r in rows})
    energy = np.full((len(hs), len(kappas)), np.nan)
    rel = np.full_like(energy, np.nan)
    for r in rows:
        i = hs.index(r["h"])
        j = kappas.index(r["kappa"])
        energy[i, j] = (
            r["e_vqe_true"] if r["e_vqe_true"] is not None else r["e_vqe_surrogate"]
        )
        if r["rel_error"] is not None:
            rel[i, j] = r["rel_error"]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    im1 = ax1.imshow(energy, origin="lower", aspect="auto", cmap="magma")
    fig.colorbar(im1, ax=ax1, label="energy")
    ax1.set_title("trained energy")
    im2 = ax2.imshow(rel, origin="lower", aspect="auto", cmap="coolwarm")
    fig.colorbar(im2, ax=ax2, label="relative error")
    ax2.set_title("relative error vs exact")
    for ax in (ax1, ax2):
        ax.set_xticks(range(len(kappas)), [f"{k:g}" for k in kappas])
        ax.set_yticks(range(len(hs)), [f"{h:g}" for h in hs])
        ax.set_xlabel(spec.xlabel or "kappa")
        ax.set_ylabel(spec.ylabel or "h")
    return fig


def _curves(spec: FigureSpec, tables) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = spec.labels or tuple(Path(p).stem for p in spec.inputs)
    for rows, label in zip(tables, labels):
        steps = [r["step"] for r in rows]
        ax.plot(steps, [r["energy"] for r in rows], label=label)
    ax.set_xlabel(spec.xlabel or "step")
    ax.set_ylabel(spec.ylabel or "energy")
    if spec.log_y:
        ax.set_yscale("log")
    if len(tables) > 1 or spec.labels:
        ax.legend()
    return fig


_BUILDERS = {
    "histogram": _histogram,
    "heatmap": _heatmap,
    "grid-pair": _grid_pair,
    "curves": _curves,
}
