"""Cycle-operator geometry, long-time pumping averages, and driven
two-band sweeps, with a deterministic sweep CLI.

The package is organized bottom-up:

* :mod:`zmaplab.smallmat`: 2x2/3x3 unitaries, Hermitian exponentials,
  eigensystems with degeneracy merging.
* :mod:`zmaplab.geometry`: cycle operators from geometric angles and
  their inverses.
* :mod:`zmaplab.pumping`: finite-n and infinite-time pumping averages,
  closed forms, grids, dephasing.
* :mod:`zmaplab.band`: the driven two-band crystal and its sweeps.
* :mod:`zmaplab.resonance`: drive-frequency to phase mapping and
  oscillation curves.
* :mod:`zmaplab.cli`: the ``zmap-lab`` command.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .band import (
    BandCycleSpec,
    BandPumpingResult,
    BiasPoint,
    KSweepRow,
    TrotterConfig,
    band_hamiltonian,
    band_pumping,
    bias_sweep,
    bz_sweep,
    default_k_grid,
    min_gap_over_cycle,
    phi_winding_profile,
    phi_zero_crossings,
    phonon_epsilon,
    refine_maximum,
    start_band_basis,
    trotter_cycle_operator,
)
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DimensionMismatch,
    GapClosedAtStart,
    NonHermitianInput,
    ParseError,
    ValidationError,
    ZmapError,
)
from .geometry import (
    AxisAngle,
    ExtractionResult,
    GeometricAngles,
    SpinSpecies,
    axis_angle_of,
    extract_angles,
    su2_cycle_operator,
    su3_cycle_operator,
    wrap_angle,
)
from .pumping import (
    PopulationDistribution,
    PumpingGridResult,
    closed_spin1_arrays,
    closed_spin_half_arrays,
    dephasing_scan,
    diagonal_ensemble,
    iterated_average,
    pg_closed_form_spin1,
    pg_closed_form_spin_half,
    pumping_grid,
    resonance_flag,
    rotation_angle,
)
from .resonance import (
    CODATA,
    OscillationCurve,
    PhysicalConstants,
    ResonanceProposal,
    oscillation_curve,
    phase_coefficient,
    phi_of_frequency,
    validity_check,
)
from .smallmat import (
    EigenSystem,
    UnitaryOperator,
    herm_exp,
    random_unitary,
    unitarity_defect,
    unitary_eigensystem,
)

__all__ = [
    "__version__",
    # errors
    "ZmapError", "DimensionMismatch", "NonHermitianInput", "ConvergenceFailure",
    "GapClosedAtStart", "ConfigError", "ParseError", "ValidationError",
    # smallmat
    "UnitaryOperator", "EigenSystem", "unitarity_defect", "herm_exp",
    "unitary_eigensystem", "random_unitary",
    # geometry
    "GeometricAngles", "SpinSpecies", "AxisAngle", "ExtractionResult",
    "su2_cycle_operator", "su3_cycle_operator", "extract_angles",
    "axis_angle_of", "wrap_angle",
    # pumping
    "PopulationDistribution", "PumpingGridResult", "iterated_average",
    "diagonal_ensemble", "pg_closed_form_spin_half", "pg_closed_form_spin1",
    "closed_spin_half_arrays", "closed_spin1_arrays",
    "pumping_grid", "dephasing_scan", "resonance_flag", "rotation_angle",
    # band
    "BandCycleSpec", "TrotterConfig", "BandPumpingResult", "KSweepRow",
    "BiasPoint", "band_hamiltonian", "phonon_epsilon", "min_gap_over_cycle",
    "trotter_cycle_operator", "band_pumping", "start_band_basis", "bz_sweep",
    "bias_sweep", "default_k_grid", "phi_winding_profile", "phi_zero_crossings",
    "refine_maximum",
    # resonance
    "PhysicalConstants", "CODATA", "ResonanceProposal", "OscillationCurve",
    "phase_coefficient", "phi_of_frequency", "oscillation_curve", "validity_check",
]
