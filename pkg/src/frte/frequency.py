"""Photon-energy group structure and per-group quadrature.

Groups are intervals of photon energy eps = h*nu (keV).  Every group
integral in the package goes through the fixed Gauss-Legendre rule in
log(eps) cached on the grid object; the integrands (Planck function,
opacities, their products) are smooth in log(eps) inside a group.
"""

import numpy as np

DEFAULT_NUM_GROUPS = 30
DEFAULT_EPS_MIN = 1e-4
DEFAULT_EPS_MAX = 100.0
DEFAULT_QUAD_ORDER = 20


class FrequencyGrid:
    """Group edges eps_{g+-1/2} plus a per-group integration rule.

    Parameters
    ----------
    edges : array_like, shape (G+1,)
        Strictly increasing, strictly positive photon energies (keV).
    spacing : str
        Tag, "logarithmic" or "custom"; informational only.
    order : int
        Gauss-Legendre order of the per-group rule in log(eps).
    """

    def __init__(self, edges, spacing="custom", order=DEFAULT_QUAD_ORDER):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ValueError("edges must be a 1-D array with at least two entries")
        if edges[0] <= 0.0:
            raise ValueError("edges must be strictly positive")
        if np.any(np.diff(edges) <= 0.0):
            raise ValueError("edges must be strictly increasing")
        if order < 2:
            raise ValueError("quadrature order must be at least 2")
        self.edges = edges
        self.spacing = spacing
        self.order = int(order)

        xi, wi = np.polynomial.legendre.leggauss(self.order)
        lo = np.log(edges[:-1])[:, None]
        hi = np.log(edges[1:])[:, None]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        u = mid + half * xi[None, :]
        # d(eps) = eps du: fold the Jacobian into the weights so that
        # (weights * f(nodes)).sum(-1) is the plain d(eps) integral.
        self.nodes = np.exp(u)                       # (G, order)
        self.weights = wi[None, :] * half * self.nodes

    @classmethod
    def log_spaced(cls, num_groups=DEFAULT_NUM_GROUPS, eps_min=DEFAULT_EPS_MIN,
                   eps_max=DEFAULT_EPS_MAX, order=DEFAULT_QUAD_ORDER):
        edges = np.geomspace(eps_min, eps_max, num_groups + 1)
        return cls(edges, spacing="logarithmic", order=order)

    @property
    def num_groups(self):
        return self.edges.size - 1

    @property
    def widths(self):
        return self.edges[1:] - self.edges[:-1]

    @property
    def centers(self):
        """Geometric group centers, natural for log-spaced grids."""
        return np.sqrt(self.edges[:-1] * self.edges[1:])

    def integrate(self, values):
        """Integrate per-group sampled values over eps.

        ``values`` has shape (G, order) or (G, order, ...); returns the
        per-group integrals with the node axis contracted.
        """
        values = np.asarray(values)
        if values.shape[:2] != self.nodes.shape:
            raise ValueError("values must be sampled on grid.nodes")
        if values.ndim == 2:
            return np.einsum("gq,gq->g", self.weights, values)
        return np.einsum("gq,gq...->g...", self.weights, values)
