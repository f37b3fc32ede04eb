"""Absorption/scattering opacities with the benchmark frequency laws.

The dimensional law is sigma = sigma0(x) / (eps^3 sqrt(T)) with eps in
keV and sigma0 in keV^(7/2) cm^-1.  A pure eps^-3 law (no temperature
factor) and a frequency-constant law are available for nondimensional
studies and for collapse checks.
"""

import numpy as np

LAWS = ("hnu3_sqrtT", "nu3", "constant")


class OpacityModel:
    """sigma_a/sigma_s evaluation; sigma?0 may be a scalar or callable of x."""

    def __init__(self, sigma_a0, sigma_s0, law="hnu3_sqrtT"):
        if law not in LAWS:
            raise ValueError(f"unknown opacity law {law!r}; expected one of {LAWS}")
        for name, coeff in (("sigma_a0", sigma_a0), ("sigma_s0", sigma_s0)):
            if not callable(coeff) and coeff < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        self.sigma_a0 = sigma_a0
        self.sigma_s0 = sigma_s0
        self.law = law

    def _coeff(self, coeff, x):
        if callable(coeff):
            return np.asarray(coeff(np.asarray(x, dtype=float)), dtype=float)
        return np.asarray(coeff, dtype=float)

    def _evaluate(self, coeff, x, eps, T):
        s0 = self._coeff(coeff, x)
        eps = np.asarray(eps, dtype=float)
        T = np.asarray(T, dtype=float)
        if self.law == "hnu3_sqrtT":
            if np.any(T <= 0.0):
                raise ValueError("opacity law requires T > 0")
            return s0 / (eps**3 * np.sqrt(T))
        if self.law == "nu3":
            out = s0 / eps**3
        else:
            out = s0 * np.ones_like(eps)
        shape = np.broadcast_shapes(np.shape(out), T.shape)
        return np.broadcast_to(out, shape)

    def sigma_a(self, x, eps, T):
        return self._evaluate(self.sigma_a0, x, eps, T)

    def sigma_s(self, x, eps, T):
        return self._evaluate(self.sigma_s0, x, eps, T)


def piecewise_coefficient(breakpoints, values):
    """Step function of position: values[k] on [breakpoints[k], breakpoints[k+1]).

    The last value extends to +inf; positions left of the first
    breakpoint take the first value.
    """
    bp = np.asarray(breakpoints, dtype=float)
    vals = np.asarray(values, dtype=float)
    if bp.ndim != 1 or bp.size != vals.size or bp.size == 0:
        raise ValueError("need equally many breakpoints and values")
    if np.any(np.diff(bp) <= 0.0):
        raise ValueError("breakpoints must be strictly increasing")
    if np.any(vals < 0.0):
        raise ValueError("opacity coefficients must be nonnegative")

    def coeff(x):
        idx = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, vals.size - 1)
        return vals[idx]

    return coeff
