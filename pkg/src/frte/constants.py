"""Physical constants in cm / ns / keV / Jk units."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Light speed, radiation constant and volumetric heat capacity.

    Defaults are the cm/ns/keV/Jk values used throughout the benchmark
    problems: c = 29.98 cm/ns, a_r = 0.01372 Jk keV^-4 cm^-3,
    C_v = 0.1 Jk keV^-1 cm^-3.
    """

    c: float = 29.98
    a_r: float = 0.01372
    C_v: float = 0.1

    def __post_init__(self):
        for name in ("c", "a_r", "C_v"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def arc(self):
        """a_r * c, the prefactor of the T^4 intensity normalization."""
        return self.a_r * self.c

    @classmethod
    def nondimensional(cls, C_v=1.0):
        """Unit-free constants: a_r = c = 1 so 4*pi*int(B) dnu = T^4."""
        return cls(c=1.0, a_r=1.0, C_v=C_v)
