"""Small dense unitary matrices: defect checks, Hermitian exponentials,
and robust eigendecomposition with degeneracy merging.

Everything here works on 2x2 and 3x3 complex matrices only.  That covers
the two spin species and the two-band crystal model, and lets the
Hermitian exponential use closed forms where they exist instead of a
general matrix-function routine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch, NonHermitianInput

__all__ = [
    "ANALYTIC_DEFECT_TOL",
    "INTEGRATED_DEFECT_TOL",
    "EigenSystem",
    "UnitaryOperator",
    "herm_exp",
    "matrix_of",
    "random_unitary",
    "unitarity_defect",
    "unitary_eigensystem",
]

# Defect budgets by provenance: exact formulas vs. step-by-step integration.
ANALYTIC_DEFECT_TOL = 1e-10
INTEGRATED_DEFECT_TOL = 1e-8

_HERMITICITY_TOL = 1e-10
_RECONSTRUCTION_TOL = 1e-9


def as_square(m: np.ndarray) -> np.ndarray:
    """Validate and return ``m`` as a complex square matrix of dim 2 or 3.

    Raises
    ------
    DimensionMismatch
        If ``m`` is not square, has unsupported dimension, or contains
        non-finite entries.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in (2, 3):
        raise DimensionMismatch(f"supported dimensions are 2 and 3, got {a.shape[0]}")
    if not np.all(np.isfinite(a.view(float))):
        raise DimensionMismatch("matrix entries must be finite")
    return a


def matrix_of(u) -> np.ndarray:
    """Return the underlying ndarray of a ``UnitaryOperator`` or array-like."""
    return as_square(getattr(u, "matrix", u))


def unitarity_defect(m: np.ndarray) -> float:
    """Frobenius norm of ``M^H M - I``, zero exactly for unitary ``M``."""
    a = as_square(m)
    eye = np.eye(a.shape[0])
    return float(np.linalg.norm(a.conj().T @ a - eye))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """A validated small unitary with its unitarity defect cached.

    Parameters
    ----------
    matrix : ndarray
        Complex square matrix of dimension 2 or 3.  Copied and frozen.
    tol : float, optional
        Maximum accepted defect.  Defaults to the analytic budget; pass
        ``INTEGRATED_DEFECT_TOL`` for operators assembled by numerical
        integration.

    Raises
    ------
    DimensionMismatch
        If the matrix fails shape validation or exceeds ``tol``.
    """

    matrix: np.ndarray
    tol: float = ANALYTIC_DEFECT_TOL
    defect: float = field(init=False)

    def __post_init__(self) -> None:
        a = as_square(self.matrix).copy()
        a.flags.writeable = False
        d = unitarity_defect(a)
        if d > self.tol:
            raise DimensionMismatch(
                f"unitarity defect {d:.3e} exceeds tolerance {self.tol:.1e}"
            )
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "defect", d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def herm_exp(h: np.ndarray, scale: float) -> UnitaryOperator:
    """Unitary exponential ``exp(-i * scale * H)`` of a Hermitian matrix.

    Dimension 2 uses the closed form through the Pauli decomposition
    ``H = h0*I + h.sigma``; dimension 3 diagonalizes ``H``.

    Raises
    ------
    NonHermitianInput
        If ``||H - H^H||_F`` exceeds 1e-10.
    """
    a = as_square(h)
    if np.linalg.norm(a - a.conj().T) > _HERMITICITY_TOL:
        raise NonHermitianInput("matrix is not Hermitian within 1e-10")
    s = float(scale)
    if a.shape[0] == 2:
        h0 = 0.5 * (a[0, 0].real + a[1, 1].real)
        hx = a[0, 1].real
        hy = -a[0, 1].imag
        hz = 0.5 * (a[0, 0].real - a[1, 1].real)
        r = np.sqrt(hx * hx + hy * hy + hz * hz)
        ang = s * r
        phase = np.exp(-1j * s * h0)
        if r == 0.0:
            m = phase * np.eye(2, dtype=complex)
        else:
            c, sn = np.cos(ang), np.sin(ang) / r
            m = phase * np.array(
                [
                    [c - 1j * sn * hz, -1j * sn * (hx - 1j * hy)],
                    [-1j * sn * (hx + 1j * hy), c + 1j * sn * hz],
                ]
            )
    else:
        w, v = np.linalg.eigh(a)
        m = (v * np.exp(-1j * s * w)) @ v.conj().T
    return UnitaryOperator(m)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Spectral decomposition of a unitary with near-degeneracies merged.

    Attributes
    ----------
    phases : ndarray
        Distinct eigenphases in ``(-pi, pi]``, sorted ascending.
    projectors : tuple of ndarray
        Orthogonal projectors onto the merged eigenspaces, same order.
    multiplicities : tuple of int
        Rank of each projector; sums to the matrix dimension.
    """

    phases: np.ndarray
    projectors: tuple
    multiplicities: tuple


def unitary_eigensystem(u, merge_tol: float = 1e-9) -> EigenSystem:
    """Eigenphases and spectral projectors of a small unitary.

    Eigenphases closer than ``merge_tol`` in circular distance are merged
    into a single projector of summed rank, so exactly and nearly
    degenerate operators get the same spectral form.  The decomposition
    runs through a complex Schur factorization, whose orthonormal basis
    makes the projectors orthogonal by construction.

    Parameters
    ----------
    u : UnitaryOperator or ndarray
        Matrix to decompose.
    merge_tol : float, optional
        Circular phase distance below which eigenvalues merge.

    Raises
    ------
    ConvergenceFailure
        If the factorization fails or the reconstruction
        ``sum_k exp(i*phase_k) P_k`` misses ``U`` by more than 1e-9.
    """
    if merge_tol <= 0:
        raise ValueError("merge_tol must be positive")
    a = matrix_of(u)
    try:
        t, z = scipy.linalg.schur(a, output="complex")
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - scipy rarely fails here
        raise ConvergenceFailure("Schur factorization did not converge") from exc
    lam = np.diag(t)
    # a zero eigenvalue (far-from-unitary input) yields NaN here and is
    # rejected by the reconstruction check below
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = lam / np.abs(lam)
    order = np.argsort(np.angle(lam))
    lam = lam[order]
    z = z[:, order]
    ph = np.angle(lam)

    # Single-linkage clustering on the circle: chain adjacent phases whose
    # gap is within merge_tol, then join across the -pi/pi seam if needed.
    n = len(ph)
    clusters = [[0]]
    for i in range(1, n):
        if ph[i] - ph[i - 1] <= merge_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and (ph[0] + 2 * np.pi - ph[-1]) <= merge_tol:
        clusters[0] = clusters.pop() + clusters[0]

    reps = []
    projectors = []
    for idx in clusters:
        rep = float(np.angle(np.mean(lam[idx])))
        # np.angle can emit exactly -pi for a -0.0 imaginary part; the
        # contract range is (-pi, pi].
        if rep <= -np.pi:
            rep += 2.0 * np.pi
        reps.append(rep)
        cols = z[:, idx]
        p = cols @ cols.conj().T
        projectors.append(p)
    order2 = np.argsort(reps)
    phases = np.array([reps[i] for i in order2])
    projectors = tuple(projectors[i] for i in order2)
    multiplicities = tuple(len(clusters[i]) for i in order2)

    recon = sum(np.exp(1j * p) * pr for p, pr in zip(phases, projectors))
    err = np.linalg.norm(recon - a)
    # "not <=" instead of ">" so a NaN (zero eigenvalue upstream) fails too
    if not err <= _RECONSTRUCTION_TOL:
        raise ConvergenceFailure(
            "spectral reconstruction misses the input beyond 1e-9; "
            "input may be far from unitary"
        )
    return EigenSystem(phases=phases, projectors=projectors, multiplicities=multiplicities)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary: QR of a complex Gaussian matrix, phase fixed."""
    if dim not in (2, 3):
        raise DimensionMismatch(f"supported dimensions are 2 and 3, got {dim}")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))
