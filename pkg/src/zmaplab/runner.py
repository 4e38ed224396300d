"""Experiment orchestration: resolved config in, sweep artifact out.

Each experiment expands its grids, fans the independent cells out to
the compute modules (which own any threading), and assembles rows in
grid order.  Row order is fixed by the grids alone, never by worker
scheduling, so a given config yields the same artifact at any worker
count.
"""

from __future__ import annotations

import math

import numpy as np

from . import __version__
from .artifact import SweepArtifact
from .band import BandCycleSpec, TrotterConfig, bias_sweep, bz_sweep, default_k_grid
from .config import RunConfig, config_echo
from .pumping import pumping_grid
from .resonance import ResonanceProposal, oscillation_curve

__all__ = ["run"]

COLUMNS = {
    "spin-map": ("theta", "phi", "method", "channel", "p_G", "resonant_flag"),
    "spin-osc": ("species", "theta", "f_hz", "phi_raw", "p_G"),
    "band-sweep": ("k", "theta", "phi", "residual", "p_G", "gap_min_ev", "status"),
    "bias-sweep": ("eps0", "P_total", "skipped_k_count"),
}


def left_open_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Uniform grid over ``(lo, hi]``: excludes ``lo``, includes ``hi``."""
    j = np.arange(1, points + 1, dtype=float)
    return lo + (hi - lo) * j / points


def _spin_map_rows(cfg: RunConfig) -> list[tuple]:
    species = cfg.spin_species
    thetas = np.linspace(cfg.theta_min, cfg.theta_max, cfg.theta_points)
    phis = left_open_grid(cfg.phi_min, cfg.phi_max, cfg.phi_points)
    if cfg.method == "both":
        methods = ["closed_form", "iterated"]
    else:
        methods = [cfg.method.replace("-", "_")]
    rows: list[tuple] = []
    for method in methods:
        grid = pumping_grid(species, cfg.channel, thetas, phis, method,
                            n_cycles=int(cfg.n_cycles), workers=cfg.workers)
        for i in range(thetas.size):
            for j in range(phis.size):
                rows.append((
                    float(thetas[i]), float(phis[j]), grid.method, grid.channel,
                    float(grid.values[i, j]), bool(grid.resonant[i, j]),
                ))
    return rows


def _spin_osc_rows(cfg: RunConfig) -> list[tuple]:
    species = cfg.spin_species
    f_grid = np.logspace(math.log10(cfg.f_min_hz), math.log10(cfg.f_max_hz), cfg.f_points)
    proposal = ResonanceProposal(b_bar=cfg.b_bar_t, f0=cfg.f0_hz, f_grid=f_grid,
                                 theta_list=cfg.osc_theta_list)
    rows: list[tuple] = []
    for theta in proposal.theta_list:
        curve = oscillation_curve(species, theta, proposal, cfg.channel)
        for i in range(curve.f.size):
            rows.append((species.value, float(theta), float(curve.f[i]),
                         float(curve.phi_raw[i]), float(curve.p_g[i])))
    return rows


def _band_cfg(cfg: RunConfig) -> tuple[BandCycleSpec, TrotterConfig, float]:
    spec = BandCycleSpec(c_h=cfg.c_h_ev, eps0=cfg.eps0, a_ph=cfg.a_ph,
                         tau_ph=cfg.tau_ph_s, k=0.0)
    n = math.inf if math.isinf(cfg.n_cycles) else int(cfg.n_cycles)
    return spec, TrotterConfig(steps_per_cycle=cfg.steps), n


def _band_sweep_rows(cfg: RunConfig) -> list[tuple]:
    spec, tcfg, n = _band_cfg(cfg)
    rows = bz_sweep(spec, tcfg, default_k_grid(cfg.k_points), n_cycles=n,
                    workers=cfg.workers)
    return [(r.k, r.theta, r.phi, r.residual, r.p_g, r.gap_min, r.status) for r in rows]


def _bias_sweep_rows(cfg: RunConfig) -> list[tuple]:
    spec, tcfg, n = _band_cfg(cfg)
    eps_grid = np.linspace(cfg.eps0_min, cfg.eps0_max, cfg.eps0_points)
    rows = bias_sweep(spec, tcfg, eps_grid, default_k_grid(cfg.k_points),
                      n_cycles=n, workers=cfg.workers)
    return [(r.eps0, r.p_total, r.skipped_k_count) for r in rows]


_DISPATCH = {
    "spin-map": _spin_map_rows,
    "spin-osc": _spin_osc_rows,
    "band-sweep": _band_sweep_rows,
    "bias-sweep": _bias_sweep_rows,
}


def run(cfg: RunConfig) -> SweepArtifact:
    """Execute the configured experiment and package its rows."""
    rows = _DISPATCH[cfg.experiment](cfg)
    return SweepArtifact(
        experiment=cfg.experiment,
        columns=COLUMNS[cfg.experiment],
        rows=rows,
        config_echo=config_echo(cfg),
        version=__version__,
    )
