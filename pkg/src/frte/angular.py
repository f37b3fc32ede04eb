"""Half-range angular quadrature for the even-odd parity unknowns.

The parity fields live on Omega in (0, 1); angular brackets are
half-range integrals with weights normalized to sum exactly 1, so
<1> = 1 and <Omega^2> = 1/3 for M >= 2.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AngularQuadrature:
    nodes: np.ndarray     # (M,) strictly increasing in (0, 1)
    weights: np.ndarray   # (M,) positive, sum exactly 1

    def __post_init__(self):
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must be matching 1-D arrays")
        if np.any(self.nodes <= 0.0) or np.any(self.nodes >= 1.0):
            raise ValueError("nodes must lie in the open interval (0, 1)")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be positive")

    @property
    def order(self):
        return self.nodes.size


def build_half_range_quadrature(M):
    """Gauss-Legendre nodes mapped affinely from (-1, 1) to (0, 1)."""
    if M < 1:
        raise ValueError("quadrature order must be at least 1")
    xi, wi = np.polynomial.legendre.leggauss(int(M))
    nodes = 0.5 * (xi + 1.0)
    weights = 0.5 * wi
    weights = weights / weights.sum()
    return AngularQuadrature(nodes=nodes, weights=weights)


def angular_moments(E, O, quad):
    """Discrete moments of even/odd parity fields over the half range.

    Returns (rho, R, K) = (sum w E, 3 sum w Omega O, sum w Omega^2 E);
    the ordinate axis is the last one.
    """
    E = np.asarray(E, dtype=float)
    O = np.asarray(O, dtype=float)
    if E.shape[-1] != quad.order or O.shape[-1] != quad.order:
        raise ValueError("ordinate axis does not match the quadrature order")
    w = quad.weights
    om = quad.nodes
    rho = E @ w
    R = 3.0 * (O @ (w * om))
    K = E @ (w * om**2)
    return rho, R, K
