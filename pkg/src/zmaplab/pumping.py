"""Long-time pumping averages over repeated cycles.

Three routes to the same quantity, with different validity domains:

* ``iterated_average``: the finite-n running average of level
  populations, by repeated state application.
* ``diagonal_ensemble``: the exact n -> infinity limit through spectral
  projectors, with near-degenerate eigenphases merged.  Ground truth at
  every parameter point.
* closed forms: analytic expressions for the infinite-time average,
  valid away from resonant parameters (eigenphase differences at
  rational multiples of 2*pi), where the orbit closure is a finite set
  instead of a torus.

The conventional initial state is the top level of the species; the
"flip" channel is the bottom level.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .geometry import GeometricAngles, SpinSpecies, su2_entries, su3_entries
from .smallmat import matrix_of, unitary_eigensystem

__all__ = [
    "PopulationDistribution",
    "PumpingGridResult",
    "closed_spin1_arrays",
    "closed_spin_half_arrays",
    "dephasing_scan",
    "diagonal_ensemble",
    "iterated_average",
    "pg_closed_form_spin1",
    "pg_closed_form_spin_half",
    "pumping_grid",
    "resonance_flag",
    "rotation_angle",
]

GRID_METHODS = ("closed_form", "diagonal_ensemble", "iterated")


@dataclass(frozen=True)
class PopulationDistribution:
    """Level populations averaged over cycles.

    ``n_cycles`` is the number of averaged cycles, or ``math.inf`` for
    the exact long-time limit.  Probabilities are ordered like
    ``species.levels`` and sum to 1 within 1e-9.
    """

    species: SpinSpecies
    probabilities: np.ndarray
    n_cycles: float

    def probability(self, level: str | int) -> float:
        return float(self.probabilities[self.species.level_index(level)])


@dataclass(frozen=True)
class PumpingGridResult:
    """Pumping probability of one channel over a (theta, phi) grid.

    ``values[i, j]`` belongs to ``(theta_grid[i], phi_grid[j])``.
    ``resonant[i, j]`` marks cells whose composite rotation angle sits
    near a low-order rational multiple of pi, where closed forms are not
    trustworthy.  ``method`` is the label of the route that produced the
    values (``closed_form``, ``diagonal_ensemble``, or ``iterated_n<N>``).
    """

    species: SpinSpecies
    channel: str
    theta_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    resonant: np.ndarray
    method: str


def _species_for_dim(dim: int) -> SpinSpecies:
    if dim == 2:
        return SpinSpecies.HALF
    if dim == 3:
        return SpinSpecies.ONE
    raise DimensionMismatch(f"no species of dimension {dim}")


def cesaro_populations_batch(mats: np.ndarray, initial_index: int, n: int) -> np.ndarray:
    """Finite-n Cesàro level populations for a batch of cycle operators.

    ``mats`` has shape (cells, d, d); returns (cells, d).  Each cell is
    computed independently by repeated state application, so the result
    for a cell does not depend on how the batch is chunked.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    cells, d, _ = mats.shape
    v = np.zeros((cells, d), dtype=complex)
    v[:, initial_index] = 1.0
    acc = np.zeros((cells, d))
    for _ in range(n):
        v = np.einsum("cij,cj->ci", mats, v)
        acc += v.real * v.real + v.imag * v.imag
    return acc / n


def iterated_average(u, initial_level: str | int, n: int = 100) -> PopulationDistribution:
    """Average populations over the first ``n`` cycles.

    Applies the cycle operator to the state ``n`` times, accumulating
    level populations after each application (never powering the
    matrix).

    Parameters
    ----------
    u : UnitaryOperator or ndarray
        Cycle operator.
    initial_level : str or int
        Level label (or index) of the starting basis state.
    n : int, optional
        Number of cycles to average, at least 1.
    """
    m = matrix_of(u)
    species = _species_for_dim(m.shape[0])
    idx = species.level_index(initial_level)
    probs = cesaro_populations_batch(m[np.newaxis], idx, n)[0]
    return PopulationDistribution(species=species, probabilities=probs, n_cycles=float(n))


def spectral_populations(m: np.ndarray, initial_index: int, merge_tol: float = 1e-9) -> np.ndarray:
    """Exact long-time populations from merged spectral projectors."""
    es = unitary_eigensystem(m, merge_tol=merge_tol)
    cols = [p[:, initial_index] for p in es.projectors]
    return np.sum([c.real * c.real + c.imag * c.imag for c in cols], axis=0)


def diagonal_ensemble(u, initial_level: str | int, merge_tol: float = 1e-9) -> PopulationDistribution:
    """Exact n -> infinity populations through the diagonal ensemble.

    Merges eigenphases closer than ``merge_tol`` before projecting, so
    degenerate operators (for example the vertex angle at pi) get their
    true long-time average rather than the generic closed form.
    """
    m = matrix_of(u)
    species = _species_for_dim(m.shape[0])
    idx = species.level_index(initial_level)
    probs = spectral_populations(m, idx, merge_tol=merge_tol)
    return PopulationDistribution(species=species, probabilities=probs, n_cycles=np.inf)


def closed_spin_half_arrays(theta, phi):
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    s2 = np.sin(t / 2.0) ** 2
    den = 1.0 - np.cos(t / 2.0) ** 2 * np.cos(p) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 0.5 * s2 / den
    return np.where(t == 0.0, 0.0, out)


def closed_spin1_arrays(theta, phi):
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    s2 = np.sin(t / 2.0) ** 2
    den = 1.0 - np.cos(t / 2.0) ** 2 * np.cos(p / 2.0) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = s2 / den
        p_m1 = 0.375 * ratio * ratio
        p_0 = ratio - 0.75 * ratio * ratio
    zero = t == 0.0
    p_m1 = np.where(zero, 0.0, p_m1)
    p_0 = np.where(zero, 0.0, p_0)
    return p_m1, p_0, 1.0 - p_m1 - p_0


def pg_closed_form_spin_half(angles: GeometricAngles) -> float:
    """Closed-form long-time flip probability for spin 1/2.

    ``p = (1/2) sin^2(theta/2) / (1 - cos^2(theta/2) cos^2(phi))``;
    pi-periodic in phi, and 0 at exactly theta = 0.  Valid away from
    resonant angles; equals ``diagonal_ensemble`` elsewhere.
    """
    return float(closed_spin_half_arrays(angles.theta, angles.phi))


def pg_closed_form_spin1(angles: GeometricAngles) -> tuple[float, float, float]:
    """Closed-form long-time populations (p_minus1, p_zero, p_plus1) for spin 1.

    ``p_minus1 = (3/8) sin^4(theta/2) / D^2`` and
    ``p_zero = sin^2(theta/2)/D - (3/4) sin^4(theta/2)/D^2`` with
    ``D = 1 - cos^2(theta/2) cos^2(phi/2)``; the remainder goes to the
    top level.  Returns (0, 0, 1) at exactly theta = 0.
    """
    m1, z, p1 = closed_spin1_arrays(angles.theta, angles.phi)
    return float(m1), float(z), float(p1)


def rotation_angle(species: SpinSpecies, theta, phi):
    """Composite rotation angle of one cycle, in ``[0, 2*pi]``.

    The cycle operator is a spin rotation by this angle: for spin 1,
    ``cos(alpha/2) = cos(theta/2) cos(phi/2)``; for spin 1/2 the level
    phases enter twice as fast, ``cos(alpha/2) = cos(theta/2) cos(phi)``.
    Eigenphase differences are multiples of this angle (for spin 1/2,
    the single difference is alpha itself).
    """
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    half = np.cos(t / 2.0) * (np.cos(p) if species is SpinSpecies.HALF else np.cos(p / 2.0))
    return 2.0 * np.arccos(np.clip(half, -1.0, 1.0))


def _rational_angle_targets(max_denominator: int) -> np.ndarray:
    vals = set()
    for q in range(1, max_denominator + 1):
        for p in range(0, 2 * q + 1):
            vals.add(p / q)
    return np.pi * np.array(sorted(vals))


def resonance_flag(species: SpinSpecies, theta, phi, window: float = 0.05,
                   max_denominator: int = 8):
    """True where the rotation angle is near a low-order rational multiple of pi.

    Flags points whose composite rotation angle lies within ``window``
    (radians) of ``pi * p / q`` for some denominator ``q`` up to
    ``max_denominator``.  On flagged cells the finite-orbit structure
    makes closed forms unreliable and finite-n averages slow to
    converge.  Broadcasts over array input; scalar input gives a bool.
    """
    alpha = rotation_angle(species, theta, phi)
    targets = _rational_angle_targets(max_denominator)
    dist = np.min(np.abs(np.asarray(alpha)[..., np.newaxis] - targets), axis=-1)
    flag = dist <= window
    if np.isscalar(theta) and np.isscalar(phi):
        return bool(flag)
    return flag


def _grid_row_matrices(species: SpinSpecies, theta: float, phi_grid: np.ndarray) -> np.ndarray:
    t = np.full_like(phi_grid, theta)
    if species is SpinSpecies.HALF:
        e = su2_entries(t, phi_grid)
        return np.stack([np.stack(e[0:2], axis=-1), np.stack(e[2:4], axis=-1)], axis=-2)
    e = su3_entries(t, phi_grid)
    rows = [np.stack(e[3 * i:3 * i + 3], axis=-1) for i in range(3)]
    return np.stack(rows, axis=-2)


def _grid_row_values(species: SpinSpecies, channel_index: int, theta: float,
                     phi_grid: np.ndarray, method: str, n_cycles: int,
                     merge_tol: float) -> np.ndarray:
    if method == "closed_form":
        if species is SpinSpecies.HALF:
            flip = closed_spin_half_arrays(theta, phi_grid)
            return flip if channel_index == 1 else 1.0 - flip
        m1, z, p1 = closed_spin1_arrays(theta, phi_grid)
        return (p1, z, m1)[channel_index]
    mats = _grid_row_matrices(species, theta, phi_grid)
    if method == "iterated":
        return cesaro_populations_batch(mats, 0, n_cycles)[:, channel_index]
    if method == "diagonal_ensemble":
        return np.array([
            spectral_populations(mats[j], 0, merge_tol=merge_tol)[channel_index]
            for j in range(mats.shape[0])
        ])
    raise ValueError(f"unknown method {method!r}; expected one of {GRID_METHODS}")


def pumping_grid(species: SpinSpecies, channel: str | int, theta_grid, phi_grid,
                 method: str, n_cycles: int = 100, merge_tol: float = 1e-9,
                 workers: int = 1) -> PumpingGridResult:
    """Pumping probability of one channel over a (theta, phi) grid.

    The initial state is always the top level; ``channel`` selects the
    reported level.  ``method`` is one of ``closed_form``,
    ``diagonal_ensemble``, or ``iterated`` (which averages ``n_cycles``
    cycles).  Cells are independent, and each grid row is computed by a
    pure function of its own inputs, so the result is identical for any
    ``workers`` count.

    Returns
    -------
    PumpingGridResult
        Values plus a per-cell resonance flag marking angles where the
        long-time limit is structurally fragile.
    """
    tg = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    pg = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if tg.size == 0 or pg.size == 0:
        raise ValueError("grids must be nonempty")
    if np.any(tg < 0.0) or np.any(tg > np.pi):
        raise ValueError("theta grid must lie in [0, pi]")
    idx = species.level_index(channel)
    label = species.levels[idx]

    def row(i: int) -> np.ndarray:
        return _grid_row_values(species, idx, tg[i], pg, method, n_cycles, merge_tol)

    if workers > 1 and tg.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(tg.size)))
    else:
        rows = [row(i) for i in range(tg.size)]
    values = np.vstack(rows)
    tt = np.broadcast_to(tg[:, np.newaxis], (tg.size, pg.size))
    pp = np.broadcast_to(pg[np.newaxis, :], (tg.size, pg.size))
    resonant = resonance_flag(species, tt, pp)
    method_label = f"iterated_n{int(n_cycles)}" if method == "iterated" else method
    return PumpingGridResult(
        species=species, channel=label, theta_grid=tg, phi_grid=pg,
        values=values, resonant=resonant, method=method_label,
    )


def dephasing_scan(species: SpinSpecies, channel: str | int, theta: float,
                   phi_grid) -> tuple[float, float]:
    """Mean and spread (max - min) of the closed form along a phi grid.

    The spread measures how much phase information survives one cycle;
    it collapses to exactly 0 at ``theta = pi`` where the closed forms
    lose their phi dependence.
    """
    pg = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if pg.size == 0:
        raise ValueError("phi grid must be nonempty")
    vals = _grid_row_values(species, species.level_index(channel), float(theta),
                            pg, "closed_form", 0, 1e-9)
    return float(np.mean(vals)), float(np.max(vals) - np.min(vals))
