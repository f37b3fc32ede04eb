"""Line-oriented run configuration.

Grammar: one `section.key = value` per line; `#` starts a comment; blank
lines ignored.  Unknown keys are hard errors.  Values are scalars,
tokens, or the small structured forms documented per key below.  Any key
may be overridden on the command line as `section.key=value`.

Keys and defaults
-----------------
mesh.nx               int >= 3            (default 100)
mesh.length           cm > 0              (default 1.0)
time.dt               ns > 0              (required)
time.t_end            >= dt               (required)
frequency.groups      int >= 1            (default 30)
frequency.eps_min     keV > 0             (default 1e-4)
frequency.eps_max     > eps_min           (default 100.0)
angular.ordinates     int >= 2            (default 16)
opacity.sigma_a0      scalar >= 0, or "piecewise x0:v0 x1:v1 ..."  (default 1.0)
opacity.sigma_s0      same                (default 0.0)
opacity.law           hnu3_sqrtT | nu3 | constant                  (default hnu3_sqrtT)
scaling.mode          dimensional | nondimensional                 (default dimensional)
scaling.epsilon       > 0                 (default 1.0; nondimensional only)
scaling.l_a           eps | one | inv_eps | positive float         (default one)
scaling.l_s           same                (default one)
weights.scheme        constant | rosseland | planck                (default constant)
bc.left               vacuum | reflective | planckian:<T_b>        (default vacuum)
bc.right              same                (default vacuum)
init.temperature      uniform:<T> | example1 | cosine:<a>,<b>,<k>  (default uniform:1e-3)
constants.c           > 0                 (default 29.98)
constants.a_r         > 0                 (default 0.01372)
constants.C_v         > 0                 (default 0.1)
solver.tol_T          keV > 0             (default 1e-10)
solver.max_outer      int >= 1            (default 200)
output.stride         int >= 1            (default 1)

`cosine:a,b,k` is T(x) = a + b*cos(k*pi*x/L).  In nondimensional mode
the constants default to c = a_r = 1, C_v = 1 unless set explicitly.
"""

import numpy as np

from .constants import PhysicalConstants
from .frequency import FrequencyGrid
from .mesh import StaggeredMesh
from .opacity import LAWS, OpacityModel, piecewise_coefficient
from .angular import build_half_range_quadrature
from .scaling import Scaling
from .solver import Boundary, BoundarySpec, SolverConfig
from .means import WEIGHT_SCHEMES


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "mesh.nx": "100",
    "mesh.length": "1.0",
    "time.dt": None,
    "time.t_end": None,
    "frequency.groups": "30",
    "frequency.eps_min": "1e-4",
    "frequency.eps_max": "100.0",
    "angular.ordinates": "16",
    "opacity.sigma_a0": "1.0",
    "opacity.sigma_s0": "0.0",
    "opacity.law": "hnu3_sqrtT",
    "scaling.mode": "dimensional",
    "scaling.epsilon": "1.0",
    "scaling.l_a": "one",
    "scaling.l_s": "one",
    "weights.scheme": "constant",
    "bc.left": "vacuum",
    "bc.right": "vacuum",
    "init.temperature": "uniform:1e-3",
    "constants.c": None,
    "constants.a_r": None,
    "constants.C_v": None,
    "solver.tol_T": "1e-10",
    "solver.max_outer": "200",
    "output.stride": "1",
}


def parse_keyvalues(text, source="<config>"):
    """Parse the grammar into a raw {key: value-string} mapping."""
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        mapping[key] = value
    return mapping


def parse_config(path, overrides=()):
    """Read a config file, apply overrides, build a SolverConfig."""
    with open(path, "r", encoding="utf-8") as fh:
        mapping = parse_keyvalues(fh.read(), source=str(path))
    apply_overrides(mapping, overrides)
    return build_config(mapping)


def apply_overrides(mapping, overrides):
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown key {key!r}")
        mapping[key] = value.strip()
    return mapping


def _get(mapping, key):
    value = mapping.get(key, _DEFAULTS[key])
    if value is None:
        raise ConfigError(f"missing required key {key!r}")
    return value


def _float(mapping, key, positive=False, nonnegative=False):
    raw = _get(mapping, key)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: {raw!r} is not a number") from None
    if positive and not value > 0.0:
        raise ConfigError(f"{key}: must be strictly positive, got {value}")
    if nonnegative and value < 0.0:
        raise ConfigError(f"{key}: must be nonnegative, got {value}")
    return value


def _int(mapping, key, minimum):
    raw = _get(mapping, key)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{key}: {raw!r} is not an integer") from None
    if value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


def _choice(mapping, key, choices):
    value = _get(mapping, key)
    if value not in choices:
        raise ConfigError(f"{key}: {value!r} not in {sorted(choices)}")
    return value


def _parse_opacity_coeff(key, raw):
    if raw.startswith("piecewise"):
        pairs = raw[len("piecewise"):].split()
        if not pairs:
            raise ConfigError(f"{key}: piecewise form needs x:value pairs")
        bps, vals = [], []
        for tok in pairs:
            try:
                x, v = tok.split(":")
                bps.append(float(x))
                vals.append(float(v))
            except ValueError:
                raise ConfigError(f"{key}: bad piecewise token {tok!r}") from None
        try:
            return piecewise_coefficient(bps, vals)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: {raw!r} is not a number or piecewise form") from None
    if value < 0.0:
        raise ConfigError(f"{key}: must be nonnegative, got {value}")
    return value


def _parse_boundary(key, raw):
    if raw == "vacuum":
        return Boundary("vacuum")
    if raw == "reflective":
        return Boundary("reflective")
    if raw.startswith("planckian:"):
        try:
            T_b = float(raw.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"{key}: bad planckian temperature in {raw!r}") from None
        if not T_b > 0.0:
            raise ConfigError(f"{key}: planckian temperature must be positive")
        return Boundary("planckian", T_b)
    raise ConfigError(f"{key}: {raw!r} is not vacuum | reflective | planckian:<T>")


def _parse_initial(key, raw, length):
    if raw.startswith("uniform:"):
        try:
            T0 = float(raw.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"{key}: bad uniform temperature {raw!r}") from None
        if not T0 > 0.0:
            raise ConfigError(f"{key}: initial temperature must be positive")
        return T0
    if raw == "example1":
        return lambda x: np.maximum(1.0 - 20.0 * (x - 1.0) ** 2, 1e-3)
    if raw.startswith("cosine:"):
        try:
            a, b, k = (float(tok) for tok in raw.split(":", 1)[1].split(","))
        except ValueError:
            raise ConfigError(f"{key}: bad cosine form {raw!r}") from None
        return lambda x: a + b * np.cos(k * np.pi * x / length)
    raise ConfigError(f"{key}: {raw!r} is not uniform:<T> | example1 | cosine:<a>,<b>,<k>")


def build_config(mapping):
    """Validate a raw mapping and assemble the SolverConfig."""
    for key in mapping:
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown key {key!r}")

    mode = _choice(mapping, "scaling.mode", ("dimensional", "nondimensional"))
    nondim = mode == "nondimensional"
    c = _float(mapping, "constants.c", positive=True) \
        if mapping.get("constants.c") is not None else (1.0 if nondim else 29.98)
    a_r = _float(mapping, "constants.a_r", positive=True) \
        if mapping.get("constants.a_r") is not None else (1.0 if nondim else 0.01372)
    C_v = _float(mapping, "constants.C_v", positive=True) \
        if mapping.get("constants.C_v") is not None else (1.0 if nondim else 0.1)
    consts = PhysicalConstants(c=c, a_r=a_r, C_v=C_v)

    if nondim:
        scaling = Scaling.nondimensional(
            _float(mapping, "scaling.epsilon", positive=True),
            l_a=_scaling_token(mapping, "scaling.l_a"),
            l_s=_scaling_token(mapping, "scaling.l_s"))
    else:
        for key in ("scaling.l_a", "scaling.l_s"):
            if mapping.get(key, "one") not in ("one", "1"):
                raise ConfigError(f"{key}: dimensional mode forces the value 'one'")
        scaling = Scaling.dimensional(consts)

    length = _float(mapping, "mesh.length", positive=True)
    mesh = StaggeredMesh(length=length, num_cells=_int(mapping, "mesh.nx", 3))
    grid = FrequencyGrid.log_spaced(
        num_groups=_int(mapping, "frequency.groups", 1),
        eps_min=_float(mapping, "frequency.eps_min", positive=True),
        eps_max=_float(mapping, "frequency.eps_max", positive=True))
    if grid.edges[0] >= grid.edges[-1]:
        raise ConfigError("frequency.eps_max: must exceed frequency.eps_min")

    opacity = OpacityModel(
        _parse_opacity_coeff("opacity.sigma_a0", _get(mapping, "opacity.sigma_a0")),
        _parse_opacity_coeff("opacity.sigma_s0", _get(mapping, "opacity.sigma_s0")),
        law=_choice(mapping, "opacity.law", LAWS))

    dt = _float(mapping, "time.dt", positive=True)
    t_end = _float(mapping, "time.t_end", positive=True)
    if t_end < dt:
        raise ConfigError("time.t_end: must be at least time.dt")

    bc = BoundarySpec(
        left=_parse_boundary("bc.left", _get(mapping, "bc.left")),
        right=_parse_boundary("bc.right", _get(mapping, "bc.right")))

    try:
        return SolverConfig(
            mesh=mesh,
            grid=grid,
            scaling=scaling,
            consts=consts,
            opacity=opacity,
            bc=bc,
            initial_temperature=_parse_initial(
                "init.temperature", _get(mapping, "init.temperature"), length),
            dt=dt,
            t_end=t_end,
            quadrature=build_half_range_quadrature(_int(mapping, "angular.ordinates", 2)),
            scheme=_choice(mapping, "weights.scheme", WEIGHT_SCHEMES),
            tol_T=_float(mapping, "solver.tol_T", positive=True),
            max_outer=_int(mapping, "solver.max_outer", 1),
            snapshot_stride=_int(mapping, "output.stride", 1),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _scaling_token(mapping, key):
    raw = _get(mapping, key)
    if raw in ("eps", "one", "1", "inv_eps"):
        return raw
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: {raw!r} is not eps | one | inv_eps | float") from None
    if value <= 0.0:
        raise ConfigError(f"{key}: must be strictly positive")
    return value
