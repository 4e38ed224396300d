"""Magnetic-drive proposal: map drive frequency to the cycle phase.

With a mean field ``B_bar``, the phase accumulated over one cycle of
period ``1/f`` relative to a reference frequency ``f0`` is
``phi_raw = c (1/f - 1/f0)`` with ``c = mu_B B_bar / hbar``.  Feeding
that phase to the spin closed forms turns a frequency sweep into the
geometric oscillation curves, and the small-parameter condition
``h f << Delta_bar`` (Zeeman splitting ``Delta_bar = 2 mu_B B_bar``)
bounds the frequencies where the cycle picture holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SpinSpecies, wrap_angle
from .pumping import closed_spin1_arrays, closed_spin_half_arrays

__all__ = [
    "CODATA",
    "OscillationCurve",
    "PhysicalConstants",
    "ResonanceProposal",
    "default_frequency_grid",
    "oscillation_curve",
    "phase_coefficient",
    "phi_of_frequency",
    "validity_check",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used by the frequency mapping."""

    hbar_j_s: float = 1.054571817e-34
    hbar_ev_s: float = 6.582119569e-16
    h_j_s: float = 6.62607015e-34
    mu_b_j_t: float = 9.2740100783e-24


CODATA = PhysicalConstants()


def default_frequency_grid() -> np.ndarray:
    """2000 log-spaced frequencies covering 2 to 50 MHz."""
    return np.logspace(np.log10(2e6), np.log10(5e7), 2000)


@dataclass(frozen=True)
class ResonanceProposal:
    """Drive-field parameters of the frequency-to-phase mapping.

    ``b_bar`` is the mean field in tesla, ``f0`` the reference frequency
    in Hz where the phase is zero, ``f_grid`` the frequencies to sweep,
    and ``theta_list`` the vertex angles of the generated curves.
    """

    b_bar: float = 0.01
    f0: float = 1e7
    f_grid: np.ndarray = field(default_factory=default_frequency_grid)
    theta_list: tuple[float, ...] = (1.0, 2.0, 3.0, 3.14)

    def __post_init__(self) -> None:
        if not self.b_bar > 0:
            raise ValueError("b_bar must be positive")
        if not self.f0 > 0:
            raise ValueError("f0 must be positive")
        grid = np.asarray(self.f_grid, dtype=float)
        if grid.size == 0 or not np.all(grid > 0):
            raise ValueError("f_grid must be nonempty with positive frequencies")
        object.__setattr__(self, "f_grid", grid)
        object.__setattr__(self, "theta_list", tuple(float(t) for t in self.theta_list))


@dataclass(frozen=True)
class OscillationCurve:
    """One oscillation curve: frequency, raw phase, pumping probability."""

    species: SpinSpecies
    theta: float
    channel: str
    f: np.ndarray
    phi_raw: np.ndarray
    p_g: np.ndarray


def phase_coefficient(proposal: ResonanceProposal,
                      constants: PhysicalConstants = CODATA) -> float:
    """Coefficient ``c = mu_B B_bar / hbar`` in rad/s."""
    return constants.mu_b_j_t * proposal.b_bar / constants.hbar_j_s


def phi_of_frequency(f, proposal: ResonanceProposal,
                     constants: PhysicalConstants = CODATA):
    """Cycle phase at drive frequency ``f`` Hz.

    Returns ``(phi, phi_raw)``: the phase wrapped into ``(-pi, pi]`` and
    the unwrapped value ``c (1/f - 1/f0)``, which is strictly decreasing
    in ``f`` and useful for plotting continuity.  Broadcasts over array
    input.
    """
    fa = np.asarray(f, dtype=float)
    if np.any(fa <= 0):
        raise ValueError("frequencies must be positive")
    c = phase_coefficient(proposal, constants)
    raw = c * (1.0 / fa - 1.0 / proposal.f0)
    if fa.ndim == 0:
        return wrap_angle(float(raw)), float(raw)
    wrapped = np.remainder(raw, 2.0 * np.pi)
    wrapped = np.where(wrapped > np.pi, wrapped - 2.0 * np.pi, wrapped)
    return wrapped, raw


def oscillation_curve(species: SpinSpecies, theta: float,
                      proposal: ResonanceProposal, channel: str | int,
                      constants: PhysicalConstants = CODATA) -> OscillationCurve:
    """Pumping versus drive frequency at a fixed vertex angle.

    Both species receive the same phase coordinate ``phi(f)``; the
    period difference between their curves (the frequency doubling) then
    comes out of the closed forms themselves.
    """
    idx = species.level_index(channel)
    _, raw = phi_of_frequency(proposal.f_grid, proposal, constants)
    if species is SpinSpecies.HALF:
        flip = closed_spin_half_arrays(theta, raw)
        p = flip if idx == 1 else 1.0 - flip
    else:
        m1, z, p1 = closed_spin1_arrays(theta, raw)
        p = (p1, z, m1)[idx]
    return OscillationCurve(
        species=species, theta=float(theta), channel=species.levels[idx],
        f=proposal.f_grid.copy(), phi_raw=raw, p_g=np.asarray(p),
    )


def validity_check(proposal: ResonanceProposal,
                   constants: PhysicalConstants = CODATA) -> tuple[float, bool]:
    """Small-parameter ratio ``h max(f) / Delta_bar`` and its verdict.

    ``Delta_bar = 2 mu_B B_bar`` is the level splitting; the phase map
    is trustworthy only when the drive quantum stays well below it, here
    thresholded at ratio < 0.1.
    """
    delta_bar = 2.0 * constants.mu_b_j_t * proposal.b_bar
    ratio = constants.h_j_s * float(np.max(proposal.f_grid)) / delta_bar
    return float(ratio), bool(ratio < 0.1)
