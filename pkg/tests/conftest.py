import numpy as np
import pytest

from frte.angular import build_half_range_quadrature
from frte.constants import PhysicalConstants
from frte.frequency import FrequencyGrid
from frte.mesh import StaggeredMesh
from frte.opacity import OpacityModel
from frte.scaling import Scaling
from frte.solver import Boundary, BoundarySpec, SolverConfig


def make_config(num_cells=20, length=2.0, sigma_a0=1.0, sigma_s0=1.0,
                law="hnu3_sqrtT", bc=("reflective", "reflective"), T0=1.0,
                dt=0.04, t_end=0.2, groups=30, ordinates=8, tol_T=1e-12,
                scaling=None, consts=None, scheme="constant", stride=1):
    consts = consts or PhysicalConstants()
    scaling = scaling or Scaling.dimensional(consts)

    def boundary(spec):
        if isinstance(spec, tuple):
            return Boundary(*spec)
        return Boundary(spec)

    return SolverConfig(
        mesh=StaggeredMesh(length=length, num_cells=num_cells),
        grid=FrequencyGrid.log_spaced(groups),
        scaling=scaling,
        consts=consts,
        opacity=OpacityModel(sigma_a0, sigma_s0, law=law),
        bc=BoundarySpec(boundary(bc[0]), boundary(bc[1])),
        initial_temperature=T0,
        dt=dt,
        t_end=t_end,
        quadrature=build_half_range_quadrature(ordinates),
        scheme=scheme,
        tol_T=tol_T,
        snapshot_stride=stride,
    )


def bump_profile(x):
    return np.maximum(1.0 - 20.0 * (x - 1.0) ** 2, 1e-3)


@pytest.fixture
def equilibrium_config():
    return make_config()
