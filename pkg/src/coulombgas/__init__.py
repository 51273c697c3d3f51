"""Equilibrium droplets of planar Coulomb gases in a quadratic field with
an inserted point charge: explicit regions, conformal boundary maps,
variational certification, Fekete-point minimisation and the
Hermitian-limit spectral density."""

from .potentials import (
    COORD_SQUARED,
    COORD_SYMMETRIC,
    ModelParams,
    Symmetry,
    d_potential,
    d_squared_potential,
    laplacian,
    potential,
    squared_potential,
)
from .droplet import (
    ContainmentViolated,
    DropletRegion,
    Phase,
    PhaseError,
    Position,
    RationalMap,
    area,
    boundary_points,
    build_rational_map,
    check_containment,
    classify_phase,
    contains,
    critical_tau,
    droplet,
    eval_map,
    invert_map,
    offcenter_tau0_map,
    postcritical_droplet,
    precritical_droplet,
    square_region,
    to_symmetric,
)
from .transforms import (
    BoundaryAmbiguity,
    CauchyValue,
    disk_log_potential,
    ellipse_cauchy,
    ellipse_log_potential,
    ellipse_power_moment,
    equilibrium_moments,
    jensen_average,
    postcritical_cauchy,
    postcritical_moments_from_cauchy,
    precritical_cauchy,
)
from .variational import (
    InequalityViolated,
    PhaseMismatch,
    VerificationReport,
    mass_one_check,
    unit_mass_residues,
    verify_equality,
    verify_inequality,
)
from .fekete import (
    DiagnosticsReport,
    FeketeConfiguration,
    empirical_diagnostics,
    energy,
    gradient,
    minimize,
)
from .spectrum1d import (
    SpectralDensity1D,
    band_edges,
    band_integral,
    density,
    marchenko_pastur_density,
    schiffer_rational,
    spectral_density,
    stieltjes,
)

__version__ = "0.1.0"
