"""Renderers for the five figure kinds.

Each renderer takes a FigureSpec and returns a matplotlib Figure; the CLI
saves it to the requested path.  Time axes are plotted in the dimensionless
alpha*t/chi units of the source CSVs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import (  # noqa: E402
    SchemaError,
    level_columns,
    population_columns,
    read_csv_columns,
    read_json,
    require_columns,
)

KINDS = ("levels", "populations", "qfi", "scaling", "sphere")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    meta: str | None = None          # sidecar JSON (levels crossings, ...)
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("at least one --in file is required")


def _apply_ranges(ax, spec: FigureSpec):
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)


def render_levels(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0])
    require_columns(cols, ["t"], spec.inputs[0])
    diab, adiab = level_columns(cols, spec.inputs[0])
    meta = read_json(spec.meta) if spec.meta else None
    alpha = (meta or {}).get("config", {}).get("alpha")
    x = cols["t"] * alpha if alpha else cols["t"]
    xlabel = r"$\alpha t/\chi$" if alpha else r"$t\,\chi$"

    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for name in diab:
        m = name.rsplit("_", 1)[1]
        ax.plot(x, cols[name], "--", lw=0.9, alpha=0.7,
                label=rf"$E_{{{m}}}$")
    for i, name in enumerate(adiab):
        ax.plot(x, cols[name], lw=1.4, label=rf"$\lambda_{{{i}}}$")
    if meta:
        for c in meta.get("crossings", []):
            ax.axvline(c["t"] * (alpha or 1.0), color="0.8", lw=0.6, zorder=0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"energy / $\chi$")
    ax.legend(fontsize=6, ncols=2, loc="upper right")
    _apply_ranges(ax, spec)
    fig.tight_layout()
    return fig


def render_populations(spec: FigureSpec):
    path = spec.inputs[0]
    cols = read_csv_columns(path)
    require_columns(cols, ["alpha_t_over_chi", "omega"], path)
    pcols = population_columns(cols, path)
    x = cols["alpha_t_over_chi"]

    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    s = (len(pcols) - 1) // 2
    for i, name in enumerate(pcols):
        ax.plot(x, cols[name], lw=1.2, label=rf"$|{i - s}\rangle$")
    ax.set_xlabel(r"$\alpha t/\chi$")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.05)
    ax2 = ax.twinx()
    ax2.plot(x, cols["omega"], "k-", lw=1.6)
    ax2.set_ylabel(r"$\Omega/\chi$")
    ax2.set_ylim(bottom=0)
    ax.legend(fontsize=6, ncols=2, loc="center left")
    _apply_ranges(ax, spec)
    fig.tight_layout()
    return fig


def render_qfi(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    for path in spec.inputs:
        cols = read_csv_columns(path)
        require_columns(cols, ["alpha_t_over_chi", "f_x"], path)
        ax.plot(cols["alpha_t_over_chi"], cols["f_x"], lw=1.3,
                label=str(path))
    ax.set_xlabel(r"$\alpha t/\chi$")
    ax.set_ylabel(r"$\mathcal{F}_x$")
    if len(spec.inputs) > 1:
        ax.legend(fontsize=6)
    _apply_ranges(ax, spec)
    fig.tight_layout()
    return fig


def render_scaling(spec: FigureSpec):
    path = spec.inputs[0]
    cols = read_csv_columns(path)
    require_columns(cols, ["n", "ideal_gain_db", "rap_gain_db"], path)
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.semilogx(cols["n"], cols["ideal_gain_db"], "o-", lw=1.2,
                label="ideal squeezed target")
    ax.semilogx(cols["n"], cols["rap_gain_db"], "s--", lw=1.2,
                label="passage-produced")
    ax.set_xlabel("atom number N")
    ax.set_ylabel("metrological gain (dB)")
    ax.legend(fontsize=7)
    _apply_ranges(ax, spec)
    fig.tight_layout()
    return fig


def render_sphere(spec: FigureSpec):
    path = spec.inputs[0]
    cols = read_csv_columns(path)
    require_columns(cols, ["theta", "phi", "w"], path)
    theta = np.unique(cols["theta"])
    phi = np.unique(cols["phi"])
    if theta.size * phi.size != cols["w"].size:
        raise SchemaError(f"{path}: (theta, phi) rows do not form a grid")
    w = cols["w"].reshape(theta.size, phi.size)

    fig = plt.figure(figsize=(8.0, 3.4))
    ax = fig.add_subplot(1, 2, 1)
    lim = np.abs(w).max()
    mesh = ax.pcolormesh(phi, theta, w, cmap="RdBu_r", vmin=-lim, vmax=lim,
                         shading="nearest")
    ax.invert_yaxis()
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$\theta$")
    fig.colorbar(mesh, ax=ax, label="W")

    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    th_g, ph_g = np.meshgrid(theta, phi, indexing="ij")
    xs = np.sin(th_g) * np.cos(ph_g)
    ys = np.sin(th_g) * np.sin(ph_g)
    zs = np.cos(th_g)
    norm = plt.Normalize(-lim, lim)
    colors = plt.get_cmap("RdBu_r")(norm(w))
    ax3.plot_surface(xs, ys, zs, facecolors=colors, rstride=1, cstride=1,
                     linewidth=0, antialiased=False, shade=False)
    ax3.set_box_aspect((1, 1, 1))
    ax3.set_axis_off()
    fig.tight_layout()
    return fig


_RENDERERS = {
    "levels": render_levels,
    "populations": render_populations,
    "qfi": render_qfi,
    "scaling": render_scaling,
    "sphere": render_sphere,
}


def render(spec: FigureSpec):
    """Render a FigureSpec to a matplotlib Figure (no file I/O)."""
    return _RENDERERS[spec.kind](spec)


def render_to_file(spec: FigureSpec) -> str:
    fig = render(spec)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output
