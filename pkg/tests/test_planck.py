"""Planck function and group-integral checks against independent oracles."""

import mpmath
import numpy as np
import pytest

from frte.constants import PhysicalConstants
from frte.frequency import FrequencyGrid
from frte.planck import (group_planck, planck_derivative, planck_intensity,
                         planck_line_integral)

CONSTS = PhysicalConstants()
NONDIM = PhysicalConstants.nondimensional()


def test_zero_temperature_is_dark():
    assert planck_intensity(1.0, 0.0, CONSTS) == 0.0
    assert planck_intensity(50.0, 0.0, NONDIM) == 0.0


def test_closed_form_value_nondimensional():
    # 15 / (4 pi^5 (e - 1)) evaluated in high precision
    with mpmath.workdps(40):
        expected = mpmath.mpf(15) / (4 * mpmath.pi**5 * (mpmath.e - 1))
    got = planck_intensity(1.0, 1.0, NONDIM)
    assert abs(got - float(expected)) < 1e-15


def test_normalization_identity_T2():
    assert planck_line_integral(2.0, CONSTS) == pytest.approx(
        CONSTS.arc * 16.0, rel=1e-8)


@pytest.mark.parametrize("T", [0.1, 1.0, 10.0])
def test_planck_identities(T):
    assert planck_line_integral(T, CONSTS) == pytest.approx(
        CONSTS.arc * T**4, rel=1e-8)
    assert planck_line_integral(T, CONSTS, derivative=True) == pytest.approx(
        4.0 * CONSTS.arc * T**3, rel=1e-8)


def test_domain_errors():
    with pytest.raises(ValueError):
        planck_intensity(0.0, 1.0, CONSTS)
    with pytest.raises(ValueError):
        planck_intensity(-1.0, 1.0, CONSTS)
    with pytest.raises(ValueError):
        planck_derivative(1.0, 0.0, CONSTS)
    with pytest.raises(ValueError):
        planck_derivative(1.0, -2.0, CONSTS)


def test_no_overflow_in_wien_tail():
    vals = planck_intensity(np.array([1e3, 1e4, 1e5]), 1.0, CONSTS)
    assert np.all(vals == 0.0)
    dvals = planck_derivative(np.array([1e3, 1e4, 1e5]), 1.0, CONSTS)
    assert np.all(dvals == 0.0)
    assert np.all(np.isfinite(planck_intensity(np.geomspace(1e-6, 1e3, 100), 1e-3, CONSTS)))


def test_derivative_positive_and_matches_finite_difference():
    eps = np.geomspace(0.01, 20.0, 40)
    T = 1.0
    db = planck_derivative(eps, T, CONSTS)
    assert np.all(db > 0.0)
    h = 1e-5
    fd = (planck_intensity(eps, T + h, CONSTS)
          - planck_intensity(eps, T - h, CONSTS)) / (2.0 * h)
    assert np.allclose(db, fd, rtol=1e-6)


def test_derivative_identity_and_decay():
    assert planck_line_integral(1.0, CONSTS, derivative=True) == pytest.approx(
        4.0 * CONSTS.arc, rel=1e-8)
    assert planck_derivative(600.0, 1.0, CONSTS) < 1e-200


def test_group_planck_near_total_coverage():
    # one group spanning ten decades needs a rule to match (order >= 20
    # is the floor, not a resolution claim)
    grid = FrequencyGrid(np.array([1e-6, 1e4]), order=400)
    Bg, dBg = group_planck(1.0, grid, CONSTS)
    assert 4.0 * np.pi * Bg.sum() == pytest.approx(CONSTS.arc, rel=1e-6)
    assert 4.0 * np.pi * dBg.sum() == pytest.approx(4.0 * CONSTS.arc, rel=1e-6)


@pytest.mark.parametrize("T", [0.01, 1.0, 16.0])
def test_group_planck_nonnegative(T):
    grid = FrequencyGrid.log_spaced(30)
    Bg, dBg = group_planck(T, grid, CONSTS)
    assert np.all(Bg >= 0.0)
    assert np.all(dBg >= 0.0)


def test_group_planck_zero_temperature():
    grid = FrequencyGrid.log_spaced(10)
    Bg, dBg = group_planck(np.array([0.0, 1.0]), grid, CONSTS)
    assert np.all(Bg[:, 0] == 0.0)
    assert np.all(Bg[:, 1] > 0.0)


def _planck_nodes(grid, T, derivative=False):
    from frte.planck import planck_samples

    return planck_samples(grid.nodes, T, CONSTS, derivative=derivative)


def test_telescoping_group_sums():
    coarse = FrequencyGrid.log_spaced(30)
    fine = FrequencyGrid.log_spaced(600)
    for T in (0.5, 1.0, 4.0):
        Bc, dBc = group_planck(T, coarse, CONSTS)
        Bf, dBf = group_planck(T, fine, CONSTS)
        assert Bc.sum() == pytest.approx(Bf.sum(), rel=1e-10)
        assert dBc.sum() == pytest.approx(dBf.sum(), rel=1e-10)
        # opacity-weighted integrands telescope too
        sc = coarse.integrate(coarse.nodes**-3 * _planck_nodes(coarse, T))
        sf = fine.integrate(fine.nodes**-3 * _planck_nodes(fine, T))
        assert sc.sum() == pytest.approx(sf.sum(), rel=1e-10)
        rc = coarse.integrate(coarse.nodes**3 * _planck_nodes(coarse, T, True))
        rf = fine.integrate(fine.nodes**3 * _planck_nodes(fine, T, True))
        assert rc.sum() == pytest.approx(rf.sum(), rel=1e-10)


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([1.0]))
    grid = FrequencyGrid.log_spaced(30)
    assert grid.num_groups == 30
    assert grid.edges[0] == pytest.approx(1e-4)
    assert grid.edges[-1] == pytest.approx(100.0)
    assert np.all(np.diff(grid.edges) > 0)
