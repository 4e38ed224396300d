"""Cycle operators on the geometric parameter space and their inverses.

A cycle is summarized by two angles: a vertex angle ``theta`` in
``[0, pi]`` and a phase ``phi`` in ``(-pi, pi]``.  This module builds the
spin-1/2 and spin-1 cycle operators from those angles, recovers the
angles from an arbitrary 2x2 unitary, and exposes the axis-angle form of
SU(2) elements used by the long-time averages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .smallmat import UnitaryOperator, matrix_of

__all__ = [
    "AxisAngle",
    "ExtractionResult",
    "GeometricAngles",
    "SpinSpecies",
    "axis_angle_of",
    "extract_angles",
    "su2_cycle_operator",
    "su3_cycle_operator",
    "wrap_angle",
]

_HALF_SQRT2 = np.sqrt(2.0) / 2.0


def wrap_angle(x: float) -> float:
    """Wrap an angle into ``(-pi, pi]``."""
    y = float(np.remainder(x, 2.0 * np.pi))
    if y > np.pi:
        y -= 2.0 * np.pi
    return y


class SpinSpecies(enum.Enum):
    """The two spin species, with their level labels in fixed row order."""

    HALF = "half"
    ONE = "one"

    @property
    def dim(self) -> int:
        return 2 if self is SpinSpecies.HALF else 3

    @property
    def levels(self) -> tuple[str, ...]:
        if self is SpinSpecies.HALF:
            return ("+1/2", "-1/2")
        return ("+1", "0", "-1")

    @property
    def top_level(self) -> str:
        """Highest level, the conventional initial state."""
        return self.levels[0]

    @property
    def flip_level(self) -> str:
        """Lowest level, the conventional pumping target channel."""
        return self.levels[-1]

    @classmethod
    def from_token(cls, token: str) -> "SpinSpecies":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise DimensionMismatch(
                f"unknown species {token!r}; expected 'half' or 'one'"
            ) from None

    def level_index(self, level: str | int) -> int:
        """Map a level label (or plain index) to its row index."""
        if isinstance(level, (int, np.integer)):
            if not 0 <= int(level) < self.dim:
                raise DimensionMismatch(f"level index {level} out of range for {self.value}")
            return int(level)
        try:
            return self.levels.index(level)
        except ValueError:
            raise DimensionMismatch(
                f"unknown level {level!r} for species {self.value}; "
                f"expected one of {self.levels}"
            ) from None


@dataclass(frozen=True)
class GeometricAngles:
    """Vertex angle and phase of one cycle.

    ``theta`` must lie in ``[0, pi]``; ``phi`` is periodic and is
    normalized into ``(-pi, pi]`` at construction.
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        t = float(self.theta)
        if not np.isfinite(t) or t < 0.0 or t > np.pi:
            raise ValueError(f"theta must be in [0, pi], got {t!r}")
        p = float(self.phi)
        if not np.isfinite(p):
            raise ValueError(f"phi must be finite, got {p!r}")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "phi", wrap_angle(p))


@dataclass(frozen=True)
class ExtractionResult:
    """Angles recovered from a 2x2 unitary plus the form-fit residual.

    ``residual`` is the Frobenius distance between the input and the
    cycle operator rebuilt from the recovered angles; it vanishes exactly
    on the two-parameter cycle family and is nonzero off it.
    """

    angles: GeometricAngles
    residual: float


@dataclass(frozen=True)
class AxisAngle:
    """Axis-angle data of an SU(2) element ``u = a0*I - i a.sigma``.

    Attributes
    ----------
    axis : ndarray
        Unit rotation axis (zero vector when ``alpha`` is negligible).
    alpha : float
        Rotation angle in ``[0, 2*pi)``.
    a0 : float
        ``cos(alpha/2)``.
    avec : ndarray
        ``sin(alpha/2) * axis``.
    polar : float
        Polar angle of the axis in ``[0, pi]``.
    """

    axis: np.ndarray
    alpha: float
    a0: float
    avec: np.ndarray
    polar: float


def su2_entries(theta, phi):
    """Entry arrays of the spin-1/2 cycle operator; broadcasts over grids."""
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    c = np.cos(t / 2.0)
    s = np.sin(t / 2.0)
    em = np.exp(-1j * p)
    ep = np.exp(1j * p)
    return c * em, -s * ep, s * em, c * ep


def su2_cycle_operator(angles: GeometricAngles) -> UnitaryOperator:
    """Spin-1/2 cycle operator for the given angles.

    The matrix is ``[[cos(t/2) e^{-i phi}, -sin(t/2) e^{i phi}],
    [sin(t/2) e^{-i phi}, cos(t/2) e^{i phi}]]`` with ``t = theta``;
    its determinant is exactly 1.
    """
    a, b, c, d = su2_entries(angles.theta, angles.phi)
    return UnitaryOperator(np.array([[a, b], [c, d]]))


def su3_entries(theta, phi):
    """Entry arrays (flat 9-tuple, row-major) of the spin-1 cycle operator."""
    t = np.asarray(theta, dtype=float)
    p = np.asarray(phi, dtype=float)
    c = np.cos(t / 2.0)
    s = np.sin(t / 2.0)
    c2 = c * c
    s2 = s * s
    cs = np.cos(t)
    sn = np.sin(t)
    em = np.exp(-1j * p)
    ep = np.exp(1j * p)
    r = _HALF_SQRT2
    return (
        c2 * em,
        -r * sn,
        s2 * ep,
        r * sn * em,
        cs * np.ones_like(p),
        -r * sn * ep,
        s2 * em,
        r * sn,
        c2 * ep,
    )


def su3_cycle_operator(angles: GeometricAngles) -> UnitaryOperator:
    """Spin-1 cycle operator for the given angles.

    This is the spin-1 rotation by ``theta`` about the y axis composed
    with level phases ``diag(e^{-i phi}, 1, e^{i phi})``; its trace is
    ``cos(theta) + (1 + cos(theta)) cos(phi)``.
    """
    e = su3_entries(angles.theta, angles.phi)
    return UnitaryOperator(np.array(e).reshape(3, 3))


def extract_angles(u) -> ExtractionResult:
    """Recover cycle angles from a 2x2 unitary.

    ``theta`` comes from the moduli of the first column,
    ``theta = 2*atan2(|u10|, |u00|)``, and ``phi`` from the phase of
    ``u00`` (falling back to ``u10`` when the top entry vanishes at
    ``theta = pi``).  Never raises on generic SU(2) input; the residual
    reports how far the input sits from the two-parameter family.
    """
    m = matrix_of(u)
    if m.shape[0] != 2:
        raise DimensionMismatch("angle extraction is defined for dim 2 only")
    theta = 2.0 * np.arctan2(abs(m[1, 0]), abs(m[0, 0]))
    if abs(m[0, 0]) > 1e-12:
        phi = -np.angle(m[0, 0])
    else:
        phi = -np.angle(m[1, 0])
    angles = GeometricAngles(float(theta), float(phi))
    a, b, c, d = su2_entries(angles.theta, angles.phi)
    rebuilt = np.array([[a, b], [c, d]])
    residual = float(np.linalg.norm(m - rebuilt))
    return ExtractionResult(angles=angles, residual=residual)


def axis_angle_of(u) -> AxisAngle:
    """Axis-angle decomposition of a 2x2 unitary with unit determinant.

    The global phase is removed by dividing out a square root of the
    determinant, so inputs only need ``|det U| = 1`` within 1e-10.
    """
    m = matrix_of(u)
    if m.shape[0] != 2:
        raise DimensionMismatch("axis-angle form is defined for dim 2 only")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(abs(det) - 1.0) > 1e-10:
        raise DimensionMismatch(f"determinant modulus {abs(det):.6f} is not 1")
    m = m / np.sqrt(det)
    # u = a0*I - i a.sigma gives u01 + u10 = -2i*ax, u10 - u01 = 2*ay,
    # u00 - u11 = -2i*az.
    a0 = 0.5 * (m[0, 0] + m[1, 1]).real
    ax = -0.5 * (m[0, 1] + m[1, 0]).imag
    ay = 0.5 * (m[1, 0] - m[0, 1]).real
    az = -0.5 * (m[0, 0] - m[1, 1]).imag
    avec = np.array([ax, ay, az])
    norm = float(np.linalg.norm(avec))
    alpha = 2.0 * np.arccos(np.clip(a0, -1.0, 1.0))
    if norm > 1e-12:
        axis = avec / norm
        polar = float(np.arccos(np.clip(axis[2], -1.0, 1.0)))
    else:
        axis = np.zeros(3)
        polar = 0.0
    return AxisAngle(axis=axis, alpha=float(alpha), a0=float(a0), avec=avec, polar=polar)
