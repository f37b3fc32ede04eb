"""1-D slab-geometry multigroup thermal radiative transfer.

Transport of the frequency-dependent radiation intensity coupled to the
material temperature, discretized with an intensity decomposition
(zeroth moment + first moment + residual) in frequency, even-odd parity
staggered finite differences in space, and backward Euler in time.  The
stepper stays stable and accurate on meshes that underresolve the photon
mean free path, and its fixed-mesh limits reproduce the gray radiation
diffusion and frequency-dependent diffusion models, both of which are
also shipped as standalone solvers for cross-checking.

Units are cm / ns / keV / Jk (1 Jk = 1e9 J) in dimensional mode; photon
"frequency" is stored as photon energy h*nu in keV so h = k = 1 in code
units.
"""

from .constants import PhysicalConstants
from .frequency import FrequencyGrid
from .opacity import OpacityModel
from .planck import group_planck, planck_derivative, planck_intensity
from .means import (
    GroupCoefficients,
    MeanOpacityReport,
    fddl_coefficients,
    group_coefficients,
    mean_opacity_table,
    radiation_temperature,
)
from .angular import AngularQuadrature, angular_moments, build_half_range_quadrature
from .scaling import Scaling
from .mesh import StaggeredMesh
from .solver import (
    Boundary,
    BoundarySpec,
    RadiationState,
    SolverConfig,
    energy_balance,
    initialize,
    run,
    step,
)
from .limits import fddl_run, gray_diffusion_run, gray_sigma

__all__ = [
    "AngularQuadrature",
    "Boundary",
    "BoundarySpec",
    "FrequencyGrid",
    "GroupCoefficients",
    "MeanOpacityReport",
    "OpacityModel",
    "PhysicalConstants",
    "RadiationState",
    "Scaling",
    "SolverConfig",
    "StaggeredMesh",
    "angular_moments",
    "build_half_range_quadrature",
    "energy_balance",
    "fddl_coefficients",
    "fddl_run",
    "gray_diffusion_run",
    "gray_sigma",
    "group_coefficients",
    "group_planck",
    "initialize",
    "mean_opacity_table",
    "planck_derivative",
    "planck_intensity",
    "radiation_temperature",
    "run",
    "step",
]
