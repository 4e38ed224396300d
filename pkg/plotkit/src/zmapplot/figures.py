"""Figure construction for the four artifact kinds.

Everything here is read-only over its inputs and deterministic: the
Agg backend is forced, SVG element ids are salted with a fixed string,
and no timestamps are written, so rendering the same CSV twice yields
identical image bytes. Masked rows (blank or NaN values, band rows
whose status is not ``ok``) appear as gaps or gray cells and are never
interpolated over.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "zmap-plot"

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure

from .errors import PlotError
from .reader import KIND_COLUMNS, Table, read_table

__all__ = ["FigureSpec", "render", "render_figure"]

_FORMATS = (".png", ".svg")

# fixed heatmap ceilings for the channels whose closed forms bound them;
# anything else falls back to the full probability range
_CHANNEL_VMAX = {"-1/2": 0.5, "-1": 0.4}

_METHOD_RANK = {"closed_form": 0, "diagonal_ensemble": 1}  # iterated_n* last

_AXIS_LABELS = {
    "spin-map": ("theta (rad)", "phi (rad)"),
    "spin-osc": ("drive frequency (Hz)", "p_G"),
    "band-sweep": ("k (rad)", "p_G"),
    "bias-sweep": ("eps0 (units of c_H)", "P_total"),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: inputs, kind, output, cosmetic options.

    ``in2_path`` overlays a second artifact of the same kind where the
    kind supports it (dashed, currently spin-osc). ``crossing_markers``
    toggles the vertical phase-crossing lines on band sweeps.
    """

    kind: str
    in_path: str
    out_path: str
    in2_path: str | None = None
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    crossing_markers: bool = True
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in KIND_COLUMNS:
            raise ValueError(
                f"kind must be one of {tuple(KIND_COLUMNS)}, got {self.kind!r}"
            )
        ext = os.path.splitext(self.out_path)[1].lower()
        if ext not in _FORMATS:
            raise ValueError(f"out_path must end in .png or .svg, got {self.out_path!r}")
        if self.dpi < 10:
            raise ValueError("dpi must be at least 10")


def _annotate_empty(ax, table: Table) -> None:
    ax.text(
        0.5, 0.5, f"no data rows in {os.path.basename(table.path)}",
        transform=ax.transAxes, ha="center", va="center", color="0.4",
    )


def _masked(values: np.ndarray, extra_mask=None) -> np.ma.MaskedArray:
    mask = ~np.isfinite(values)
    if extra_mask is not None:
        mask = mask | extra_mask
    return np.ma.masked_array(values, mask=mask)


def _pivot(x: np.ndarray, y: np.ndarray, v: np.ndarray):
    """Scatter triplets onto a rectangular grid; absent cells stay NaN."""
    xu = np.unique(x)
    yu = np.unique(y)
    grid = np.full((yu.size, xu.size), np.nan)
    grid[np.searchsorted(yu, y), np.searchsorted(xu, x)] = v
    return xu, yu, grid


def _spin_map_panels(fig: Figure, table: Table) -> None:
    if len(table) == 0:
        _annotate_empty(fig.add_subplot(), table)
        return
    methods = list(dict.fromkeys(table.column("method")))
    methods.sort(key=lambda m: (_METHOD_RANK.get(m, 2), m))
    channel = table.column("channel")[0]
    vmax = _CHANNEL_VMAX.get(channel, 1.0)

    theta = table.floats("theta")
    phi = table.floats("phi")
    p = table.floats("p_G")
    by_method = np.asarray(table.column("method"))

    axes = fig.subplots(1, len(methods), sharey=True, squeeze=False)[0]
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("0.8")
    mesh = None
    for ax, method in zip(axes, methods):
        sel = by_method == method
        xu, yu, grid = _pivot(theta[sel], phi[sel], p[sel])
        mesh = ax.pcolormesh(
            xu, yu, _masked(grid), shading="nearest",
            vmin=0.0, vmax=vmax, cmap=cmap, rasterized=True,
        )
        mesh.set_gid("p-map")
        ax.set_title(method, fontsize="medium")
        ax.set_xlabel(_AXIS_LABELS["spin-map"][0])
    axes[0].set_ylabel(_AXIS_LABELS["spin-map"][1])
    fig.colorbar(mesh, ax=list(axes), label=f"p_G, channel {channel}")


def _osc_lines(ax, table: Table, dashed: bool) -> None:
    species = np.asarray(table.column("species"))
    theta = table.floats("theta")
    f = table.floats("f_hz")
    p = table.floats("p_G")
    style = "--" if dashed else "-"
    seen: list[tuple[str, float]] = []
    for key in zip(species, theta):
        if key not in seen:
            seen.append(key)
    for sp, th in seen:
        sel = (species == sp) & (theta == th)
        label = f"{sp}, theta={th:g}" + (" (overlay)" if dashed else "")
        ax.plot(f[sel], _masked(p[sel]), style, linewidth=1.0, label=label)


def _spin_osc(ax, table: Table, table2: Table | None) -> None:
    if len(table) == 0:
        _annotate_empty(ax, table)
    else:
        _osc_lines(ax, table, dashed=False)
    if table2 is not None and len(table2) > 0:
        _osc_lines(ax, table2, dashed=True)
    ax.set_xscale("log")
    ax.set_xlabel(_AXIS_LABELS["spin-osc"][0])
    ax.set_ylabel(_AXIS_LABELS["spin-osc"][1])
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize="small")


def _phase_crossings(k: np.ndarray, phi_wrapped: np.ndarray) -> np.ndarray:
    """Momenta where the unwrapped phase passes a multiple of 2*pi.

    Works from the artifact's wrapped phase column alone; adjacent
    samples are assumed close enough for unwrapping, which holds for
    the grids the sweep tool writes.
    """
    if k.size < 2:
        return np.empty(0)
    y = np.unwrap(phi_wrapped) / (2.0 * math.pi)
    locs = []
    for i in range(y.size - 1):
        y0, y1 = y[i], y[i + 1]
        if y1 == y0:
            continue
        lo, hi = (y0, y1) if y1 > y0 else (y1, y0)
        for m in range(math.ceil(lo), math.floor(hi) + 1):
            frac = (m - y0) / (y1 - y0)
            if 0.0 <= frac < 1.0 or (i == y.size - 2 and frac == 1.0):
                locs.append(k[i] + frac * (k[i + 1] - k[i]))
    return np.array(sorted(locs))


def _band_sweep(ax, table: Table, markers: bool) -> None:
    if len(table) == 0:
        _annotate_empty(ax, table)
    else:
        k = table.floats("k")
        p = table.floats("p_G")
        phi = table.floats("phi")
        ok = np.asarray(table.column("status")) == "ok"
        line_p = _masked(p, extra_mask=~ok)
        ax.plot(k, line_p.filled(np.nan), "-", linewidth=1.2,
                color="tab:blue", gid="p_g-line")
        if np.any(~ok):
            ax.plot(k[~ok], np.zeros(int(np.sum(~ok))), "x", color="0.5",
                    markersize=5, gid="masked-rows", label="masked (status != ok)")
            ax.legend(fontsize="small")
        if markers:
            keep = ok & np.isfinite(phi)
            for kc in _phase_crossings(k[keep], phi[keep]):
                ax.axvline(kc, linestyle="--", linewidth=0.7, color="0.6",
                           gid="phi-crossing")
    ax.set_xlabel(_AXIS_LABELS["band-sweep"][0])
    ax.set_ylabel(_AXIS_LABELS["band-sweep"][1])


def _bias_sweep(ax, table: Table) -> None:
    if len(table) == 0:
        _annotate_empty(ax, table)
    else:
        eps0 = table.floats("eps0")
        total = table.floats("P_total")
        skipped = table.floats("skipped_k_count")
        ax.plot(eps0, _masked(total).filled(np.nan), "-o", markersize=3,
                color="tab:red", gid="p-total-line")
        partial = skipped > 0
        if np.any(partial):
            ax.plot(eps0[partial], total[partial], "o", markersize=7,
                    markerfacecolor="none", color="0.3", gid="partial-points",
                    linestyle="none", label="some momenta skipped")
            ax.legend(fontsize="small")
    ax.set_xlabel(_AXIS_LABELS["bias-sweep"][0])
    ax.set_ylabel(_AXIS_LABELS["bias-sweep"][1])


def render_figure(spec: FigureSpec) -> Figure:
    """Build the matplotlib figure for ``spec`` without saving it."""
    table = read_table(spec.in_path, spec.kind)
    table2 = None
    if spec.in2_path is not None:
        if spec.kind != "spin-osc":
            raise PlotError(f"kind {spec.kind!r} does not take a second input")
        table2 = read_table(spec.in2_path, spec.kind)

    if spec.kind == "spin-map":
        n_panels = max(1, len(dict.fromkeys(table.column("method"))))
        fig = plt.figure(figsize=(3.4 * n_panels + 1.4, 3.4), layout="constrained")
        _spin_map_panels(fig, table)
        axes = fig.axes[: n_panels if len(table) else 1]
    else:
        fig = plt.figure(figsize=(6.4, 4.0), layout="constrained")
        ax = fig.add_subplot()
        if spec.kind == "spin-osc":
            _spin_osc(ax, table, table2)
        elif spec.kind == "band-sweep":
            _band_sweep(ax, table, spec.crossing_markers)
        else:
            _bias_sweep(ax, table)
        axes = [ax]

    for ax in axes:
        if spec.xlabel is not None:
            ax.set_xlabel(spec.xlabel)
        if spec.ylabel is not None:
            ax.set_ylabel(spec.ylabel)
        if spec.xlim is not None:
            ax.set_xlim(*spec.xlim)
        if spec.ylim is not None:
            ax.set_ylim(*spec.ylim)
    fig.suptitle(spec.title if spec.title is not None else spec.kind)
    return fig


def render(spec: FigureSpec) -> str:
    """Render ``spec`` to its output path and return that path.

    The output format follows the path suffix. SVG output drops the
    creation date so reruns produce identical bytes.
    """
    fig = render_figure(spec)
    ext = os.path.splitext(spec.out_path)[1].lower()
    parent = os.path.dirname(spec.out_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    metadata = {"Date": None} if ext == ".svg" else None
    try:
        fig.savefig(spec.out_path, dpi=spec.dpi, metadata=metadata)
    finally:
        plt.close(fig)
    return spec.out_path
