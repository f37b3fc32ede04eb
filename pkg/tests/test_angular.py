"""Half-range quadrature and discrete angular moments."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frte.angular import angular_moments, build_half_range_quadrature


def test_single_node():
    q = build_half_range_quadrature(1)
    assert q.nodes[0] == pytest.approx(0.5)
    assert q.weights[0] == pytest.approx(1.0)


def test_two_nodes():
    q = build_half_range_quadrature(2)
    assert np.allclose(q.nodes, [0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
    assert np.allclose(q.weights, [0.5, 0.5])


def test_zero_order_rejected():
    with pytest.raises(ValueError):
        build_half_range_quadrature(0)


@pytest.mark.parametrize("M", [2, 4, 8, 16, 32])
def test_weight_sum_and_second_moment(M):
    q = build_half_range_quadrature(M)
    assert abs(q.weights.sum() - 1.0) <= 1e-14
    assert abs(np.dot(q.weights, q.nodes**2) - 1.0 / 3.0) <= 1e-12
    assert np.all(np.diff(q.nodes) > 0)
    assert np.all((q.nodes > 0) & (q.nodes < 1))


@pytest.mark.parametrize("M", [2, 4, 8])
def test_polynomial_exactness(M):
    q = build_half_range_quadrature(M)
    for p in range(2 * M):
        assert np.dot(q.weights, q.nodes**p) == pytest.approx(1.0 / (p + 1),
                                                              abs=1e-12)


def test_eighth_order_fourth_moment():
    q = build_half_range_quadrature(8)
    assert abs(np.dot(q.weights, q.nodes**4) - 0.2) <= 1e-12


def test_isotropic_field_moments():
    q = build_half_range_quadrature(8)
    rho, R, K = angular_moments(np.ones(8), np.zeros(8), q)
    assert rho == pytest.approx(1.0, abs=1e-14)
    assert R == pytest.approx(0.0, abs=1e-14)
    assert K == pytest.approx(1.0 / 3.0, abs=1e-13)


def test_drift_field_moments():
    q = build_half_range_quadrature(8)
    rho, R, K = angular_moments(np.zeros(8), q.nodes.copy(), q)
    assert rho == 0.0
    assert R == pytest.approx(1.0, abs=1e-13)
    assert K == 0.0


def test_refinement_oracle_polynomial_fields():
    rng = np.random.default_rng(42)
    coeff_E = rng.normal(size=11)
    coeff_O = rng.normal(size=11)
    out = []
    for M in (16, 64):
        q = build_half_range_quadrature(M)
        E = np.polynomial.polynomial.polyval(q.nodes, coeff_E)
        O = np.polynomial.polynomial.polyval(q.nodes, coeff_O)
        out.append(angular_moments(E, O, q))
    for a, b in zip(*out):
        assert a == pytest.approx(b, abs=1e-10)


def test_length_mismatch_rejected():
    q = build_half_range_quadrature(4)
    with pytest.raises(ValueError):
        angular_moments(np.ones(3), np.zeros(4), q)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.floats(-5, 5), st.floats(-5, 5))
def test_moments_are_linear(M, a, b):
    q = build_half_range_quadrature(M)
    rng = np.random.default_rng(M)
    E1, O1 = rng.normal(size=M), rng.normal(size=M)
    E2, O2 = rng.normal(size=M), rng.normal(size=M)
    lhs = angular_moments(a * E1 + b * E2, a * O1 + b * O2, q)
    m1 = angular_moments(E1, O1, q)
    m2 = angular_moments(E2, O2, q)
    for L, x, y in zip(lhs, m1, m2):
        assert L == pytest.approx(a * x + b * y, abs=1e-10)
