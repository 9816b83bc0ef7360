"""Two-charge bound systems in a weak parametrised post-Newtonian background."""
from .geometry import (
    DEFAULT_C,
    MetricComponents,
    PpnContext,
    Tetrad,
    UnitSystem,
    WeakFieldError,
    lapse,
    metric_components,
    spatial_inner,
    tetrad,
)
from .states import ComState, LagrangianBreakdown, SingularPointError, TwoParticleState, ValidityError
from .order import OrderResult, ScalingProbe, fit_slope, residual_order, richardson_limit
from .lagrangians import (
    darwin_lagrangian,
    exact_point_lagrangian,
    legendre_hamiltonian,
    numerical_legendre,
    pn_point_lagrangian,
    total_lagrangian,
)
from .em_sector import (
    ChargeModel,
    FieldConfiguration,
    GridSpec,
    PlaneWave,
    QuadratureBox,
    field_energy,
    poisson_convergence,
    poisson_residual,
)
from .hamiltonians import (
    HamiltonianReport,
    composite_identity_residual,
    cross_term_residual,
    h_com_split,
    h_final,
    h_lab_new,
    h_point,
    decoupling_transform,
)
from .spectrum import RadialProblem, SpectrumResult, internal_levels, mass_defect, proper_time_frequency, solve_radial
from .dynamics import Trajectory, free_fall_separation, integrate_point
from .config import ConfigError, RunConfig, load_config

__all__ = [
    "DEFAULT_C",
    "MetricComponents",
    "PpnContext",
    "Tetrad",
    "UnitSystem",
    "WeakFieldError",
    "lapse",
    "metric_components",
    "spatial_inner",
    "tetrad",
    "ComState",
    "LagrangianBreakdown",
    "SingularPointError",
    "TwoParticleState",
    "ValidityError",
    "OrderResult",
    "ScalingProbe",
    "fit_slope",
    "residual_order",
    "richardson_limit",
    "darwin_lagrangian",
    "exact_point_lagrangian",
    "legendre_hamiltonian",
    "numerical_legendre",
    "pn_point_lagrangian",
    "total_lagrangian",
    "ChargeModel",
    "FieldConfiguration",
    "GridSpec",
    "PlaneWave",
    "QuadratureBox",
    "field_energy",
    "poisson_convergence",
    "poisson_residual",
    "HamiltonianReport",
    "composite_identity_residual",
    "cross_term_residual",
    "h_com_split",
    "h_final",
    "h_lab_new",
    "h_point",
    "decoupling_transform",
    "RadialProblem",
    "SpectrumResult",
    "internal_levels",
    "mass_defect",
    "proper_time_frequency",
    "solve_radial",
    "Trajectory",
    "free_fall_separation",
    "integrate_point",
    "ConfigError",
    "RunConfig",
    "load_config",
]

__version__ = "0.1.0"
