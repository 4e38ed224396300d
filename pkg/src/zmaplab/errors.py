"""Exception hierarchy shared across the package.

Every error raised by this package derives from :class:`ZmapError`, so
callers can catch one base class at an API boundary.  Configuration errors
(bad files, bad values) are kept distinct from numerical failures so the
command line tool can map them to different exit codes.
"""

from __future__ import annotations


class ZmapError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ZmapError, ValueError):
    """An array has the wrong shape, or an unsupported matrix dimension."""


class NonHermitianInput(ZmapError, ValueError):
    """A matrix that must be Hermitian failed the symmetry check."""


class ConvergenceFailure(ZmapError, RuntimeError):
    """An iterative numerical routine did not reach its target accuracy."""


class GapClosedAtStart(ZmapError, ValueError):
    """The two band energies coincide at t = 0 and no fallback basis exists."""


class ConfigError(ZmapError):
    """Base class for configuration problems; maps to CLI exit code 2."""


class ParseError(ConfigError):
    """A config file line could not be parsed."""


class ValidationError(ConfigError):
    """A parsed config value violates a documented constraint."""
