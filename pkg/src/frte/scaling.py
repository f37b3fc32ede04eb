"""Scaling group for the transport system.

The stepper solves

    (1/C) dI/dt + Omega . grad I = L_a sigma_a (B - I) + L_s sigma_s (rho - I)
    (C_v / (C P0)) dT/dt = sum_g 4 pi L_a (sigma1 rho_g - sigma2 B_g)

so a single Scaling object selects either physical units or an
asymptotic regime.  Dimensional runs take C = c and P0 = 1/c: the
product C*P0 = 1 is what reduces the temperature equation to
C_v dT/dt = int int sigma_a (I - B) with intensity-normalized B.
Nondimensional runs take C = 1/epsilon, P0 = 1 and the L factors from
the regime menu (each of epsilon, 1, or 1/epsilon).
"""

from dataclasses import dataclass

_L_TOKENS = {"eps": "epsilon", "one": None, "inv_eps": "inverse"}


def _resolve_l(token, epsilon):
    if isinstance(token, str):
        if token == "eps":
            return epsilon
        if token in ("one", "1"):
            return 1.0
        if token == "inv_eps":
            return 1.0 / epsilon
        raise ValueError(f"unknown scaling token {token!r}")
    value = float(token)
    if value <= 0.0:
        raise ValueError("scaling factors must be strictly positive")
    return value


@dataclass(frozen=True)
class Scaling:
    mode: str            # "dimensional" | "nondimensional"
    epsilon: float
    C: float
    P0: float
    L_a: float
    L_s: float

    def __post_init__(self):
        if self.mode not in ("dimensional", "nondimensional"):
            raise ValueError(f"unknown scaling mode {self.mode!r}")
        for name in ("epsilon", "C", "P0", "L_a", "L_s"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.mode == "dimensional" and (self.L_a != 1.0 or self.L_s != 1.0):
            raise ValueError("dimensional mode forces L_a = L_s = 1")

    @classmethod
    def dimensional(cls, consts):
        return cls(mode="dimensional", epsilon=1.0, C=consts.c,
                   P0=1.0 / consts.c, L_a=1.0, L_s=1.0)

    @classmethod
    def nondimensional(cls, epsilon, l_a="inv_eps", l_s="inv_eps"):
        if not epsilon > 0.0:
            raise ValueError("epsilon must be strictly positive")
        return cls(mode="nondimensional", epsilon=epsilon, C=1.0 / epsilon,
                   P0=1.0, L_a=_resolve_l(l_a, epsilon), L_s=_resolve_l(l_s, epsilon))
