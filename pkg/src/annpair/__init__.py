"""Interval-set algebra, concentrated-pair constructions and lattice
counting certificates.

The compiled kernel extension is optional; ``annpair.BACKEND`` reports
which implementation was selected at import time.
"""

from ._backend import BACKEND
from .bump import BumpSpec, build_bump, get_default_bump
from .concentration import (
    ConcentrationReport,
    concentration_ratio,
    fitted_constant,
    l2_mass,
    plancherel_check,
    tail_bound,
    window_masses,
)
from .construction import (
    GAP,
    GAP_PERIOD,
    Family,
    Level,
    LevelParams,
    assemble_family,
    build_cell_set,
    build_family,
    build_level,
    build_support_set,
    choose_scale,
)
from .counting import (
    BlockAudit,
    BlockCertificate,
    PointAssembly,
    assemble_points,
    averaged_identity,
    block_audit,
    block_certificate,
    high_density_alphas,
    lattice_density,
    lattice_points_in_set,
    van_der_corput,
)
from .intervals import (
    GapNormalization,
    Interval,
    IntervalSet,
    MultiplicityProfile,
    PeriodicBlockUnion,
    PeriodicIntervalSet,
    ThinnessReport,
    complement_within,
    density_profile,
    epsilon_thin_check,
    intersect,
    measure,
    measure_within,
    periodic_gap_check,
    projection_and_multiplicity,
    sigma_from_gap,
    union,
)
from .trig import (
    DegreeCertificate,
    ScaledTrigPoly,
    TrigPoly,
    choose_degree,
    fejer,
    fejer_closed_form,
    minimal_bandwidth,
    scale_to_period,
    shifted_fejer,
    squared_moments,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "BumpSpec", "build_bump", "get_default_bump",
    "ConcentrationReport", "concentration_ratio", "fitted_constant", "l2_mass",
    "plancherel_check", "tail_bound", "window_masses",
    "GAP", "GAP_PERIOD", "Family", "Level", "LevelParams", "assemble_family",
    "build_cell_set", "build_family", "build_level", "build_support_set", "choose_scale",
    "BlockAudit", "BlockCertificate", "PointAssembly", "assemble_points",
    "averaged_identity", "block_audit", "block_certificate", "high_density_alphas",
    "lattice_density", "lattice_points_in_set", "van_der_corput",
    "GapNormalization", "Interval", "IntervalSet", "MultiplicityProfile",
    "PeriodicBlockUnion", "PeriodicIntervalSet", "ThinnessReport",
    "complement_within", "density_profile", "epsilon_thin_check", "intersect",
    "measure", "measure_within", "periodic_gap_check", "projection_and_multiplicity",
    "sigma_from_gap", "union",
    "DegreeCertificate", "ScaledTrigPoly", "TrigPoly", "choose_degree", "fejer",
    "fejer_closed_form", "minimal_bandwidth", "scale_to_period", "shifted_fejer",
    "squared_moments",
]
