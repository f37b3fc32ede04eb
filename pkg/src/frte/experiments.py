"""Benchmark presets and the CSV-producing experiment drivers.

Every preset is a raw key-value mapping in the config grammar, so any
entry can be overridden from the command line.  Drivers write the
documented CSV schemas and raise ConvergenceError / OSError upward; exit
code policy lives in the CLI.
"""

import os

import numpy as np

from .config import ConfigError, apply_overrides, build_config
from .csvio import profile_rows, write_csv
from .frequency import FrequencyGrid
from .limits import fddl_run, gray_diffusion_run
from .means import fddl_coefficients, mean_opacity_table
from .opacity import OpacityModel
from .solver import run

EXPERIMENT_TAGS = ("ex1", "ex2", "ex3", "table1", "coeffs", "converge",
                   "ap-gray", "ap-fddl")

EX1_CASES = ((1.0, 1000.0), (1000.0, 1.0), (1000.0, 1000.0), (1.0, 1.0))
EX2_SIGMA_A0 = (10.0, 100.0, 1000.0)
AP_SCALINGS = (("equilibrium", "inv_eps", "inv_eps"),
               ("absorption", "inv_eps", "eps"),
               ("scattering", "one", "inv_eps"))


def ex1_mapping(sigma_a0, sigma_s0, dx=0.01, dt=0.04, t_end=2.0):
    return {
        "mesh.length": "2.0",
        "mesh.nx": str(int(round(2.0 / dx))),
        "time.dt": repr(dt),
        "time.t_end": repr(t_end),
        "opacity.sigma_a0": repr(sigma_a0),
        "opacity.sigma_s0": repr(sigma_s0),
        "bc.left": "vacuum",
        "bc.right": "vacuum",
        "init.temperature": "example1",
    }


def ex2_mapping(sigma_a0, dt=0.005):
    return {
        "mesh.length": "5.0",
        "mesh.nx": "1000",
        "time.dt": repr(dt),
        "time.t_end": "1.0",
        "opacity.sigma_a0": repr(sigma_a0),
        "opacity.sigma_s0": "0.0",
        "bc.left": "planckian:1.0",
        "bc.right": "reflective",
        "init.temperature": "uniform:1e-3",
    }


def ex3_mapping(dt=0.02):
    return {
        "mesh.length": "3.0",
        "mesh.nx": "150",
        "time.dt": repr(dt),
        "time.t_end": "1.0",
        "opacity.sigma_a0": "piecewise 0:10 2:1000",
        "opacity.sigma_s0": "0.0",
        "bc.left": "planckian:1.0",
        "bc.right": "vacuum",
        "init.temperature": "uniform:1e-3",
    }


def ap_mapping(l_a, l_s, epsilon=1e-6):
    return {
        "mesh.length": "1.0",
        "mesh.nx": "20",
        "time.dt": "0.05",
        "time.t_end": "0.5",
        "scaling.mode": "nondimensional",
        "scaling.epsilon": repr(epsilon),
        "scaling.l_a": l_a,
        "scaling.l_s": l_s,
        "opacity.sigma_a0": "400.0",
        "opacity.sigma_s0": "400.0",
        "opacity.law": "nu3",
        "bc.left": "reflective",
        "bc.right": "reflective",
        "init.temperature": "cosine:0.8,0.2,2",
        "solver.tol_T": "1e-12",
    }


def _config(mapping, overrides, stride=None):
    mapping = dict(mapping)
    apply_overrides(mapping, overrides)
    if stride is not None:
        mapping["output.stride"] = str(stride)
    return build_config(mapping)


def _write_profile(path, snap, x):
    header, rows = profile_rows(x, snap.T, snap.T_r, snap.rho)
    write_csv(path, header, rows)


def _tag_time(t):
    return format(t, "g")


def run_ex1(out_dir, overrides=(), stride=None):
    paths = []
    for k, (sa0, ss0) in enumerate(EX1_CASES, start=1):
        cfg = _config(ex1_mapping(sa0, ss0), overrides, stride)
        snaps = run(cfg)
        final = snaps[-1]
        path = os.path.join(out_dir, f"ex1_case{k}_profile_t{_tag_time(final.t)}.csv")
        _write_profile(path, final, cfg.mesh.centers)
        paths.append(path)
    return paths


def run_ex2(out_dir, overrides=(), stride=None, reference=False):
    paths = []
    for sa0 in EX2_SIGMA_A0:
        dt = 1e-5 if reference else 0.005
        cfg = _config(ex2_mapping(sa0, dt=dt), overrides, stride)
        snaps = run(cfg)
        final = snaps[-1]
        suffix = "_ref" if reference else ""
        path = os.path.join(
            out_dir, f"ex2_s{int(sa0)}{suffix}_profile_t{_tag_time(final.t)}.csv")
        _write_profile(path, final, cfg.mesh.centers)
        paths.append(path)
    return paths


def run_ex3(out_dir, overrides=(), stride=None):
    cfg = _config(ex3_mapping(), overrides, stride)
    snaps = run(cfg)
    final = snaps[-1]
    path = os.path.join(out_dir, f"ex3_profile_t{_tag_time(final.t)}.csv")
    _write_profile(path, final, cfg.mesh.centers)
    return [path]


def run_table1(out_dir, temperatures=(1.0, 2.0, 4.0, 8.0, 16.0)):
    rep = mean_opacity_table(list(temperatures))
    rows = [[T, ref, ros, er, con, ec] for T, ref, ros, er, con, ec in zip(
        rep.temperatures, rep.reference, rep.rosseland, rep.rel_err_rosseland,
        rep.constant, rep.rel_err_constant)]
    path = os.path.join(out_dir, "table1.csv")
    write_csv(path, ["T", "ref", "rosseland", "rel_err_r", "constant", "rel_err_c"], rows)
    return [path]


def run_coeffs(out_dir, temperature=1.0):
    grid = FrequencyGrid.log_spaced(30)
    opacity = OpacityModel(1.0, 1.0, law="nu3")
    series = fddl_coefficients(temperature, temperature, grid, opacity)
    header = ["group", "center_eps", "sigma_a_pc", "sigma_a_ross",
              "sigma_a_planck", "sigma_a_planck_tr", "inv_sigma_s_pc",
              "inv_sigma_s_ross"]
    rows = []
    for g in range(grid.num_groups):
        rows.append([g + 1, series.centers[g], series.sigma_a_pc[g],
                     series.sigma_a_ross[g], series.sigma_a_planck[g],
                     series.sigma_a_planck_tr[g], series.inv_sigma_s_pc[g],
                     series.inv_sigma_s_ross[g]])
    path = os.path.join(out_dir, "coeffs.csv")
    write_csv(path, header, rows)
    return [path]


def restrict_to_coarse(T_fine):
    """Average fine cells pairwise onto the coarse grid (2x refinement)."""
    return 0.5 * (T_fine[0::2] + T_fine[1::2])


def convergence_errors(case, levels=3, dx0=2e-2, t_end=1.0, overrides=()):
    """Self-convergence data for one opacity case of the bump benchmark.

    Returns (dx_list, dt_list, errors, orders, ls_order).  error(dx) is
    the cell-averaged l1 difference against the dx/2 run at t_end; the
    least-squares slope of log(error) vs log(dx) is the observed order.
    """
    sa0, ss0 = EX1_CASES[case - 1]
    dxs = [dx0 / 2**k for k in range(levels + 1)]
    finals = []
    for dx in dxs:
        cfg = _config(ex1_mapping(sa0, ss0, dx=dx, dt=dx, t_end=t_end),
                      overrides, stride=10**9)
        finals.append(run(cfg)[-1].T)
    errors = []
    for k in range(levels):
        coarse = finals[k]
        fine = restrict_to_coarse(finals[k + 1])
        errors.append(dxs[k] * float(np.abs(coarse - fine).sum()))
    orders = [float("nan")]
    for k in range(1, levels):
        orders.append(np.log2(errors[k - 1] / errors[k]))
    slope = np.polyfit(np.log(dxs[:levels]), np.log(errors), 1)[0] if levels > 1 \
        else float("nan")
    return dxs[:levels], dxs[:levels], errors, orders, float(slope)


def run_converge(out_dir, overrides=(), levels=3, cases=(1, 2, 3, 4)):
    paths = []
    for case in cases:
        dxs, dts, errors, orders, slope = convergence_errors(
            case, levels=levels, overrides=overrides)
        rows = [[k + 1, dxs[k], dts[k], errors[k], orders[k]]
                for k in range(len(errors))]
        path = os.path.join(out_dir, f"converge_case{case}_errors.csv")
        write_csv(path, ["level", "dx", "dt", "error_T", "observed_order"], rows)
        paths.append(path)
    return paths


def ap_gray_comparison(name, l_a, l_s, overrides=()):
    cfg = _config(ap_mapping(l_a, l_s), overrides, stride=10**9)
    transport = run(cfg)[-1]
    oracle = gray_diffusion_run(cfg)[-1]
    diff = float(np.max(np.abs(transport.T - oracle.T)) / np.max(np.abs(oracle.T)))
    return cfg, transport, oracle, diff


def run_ap_gray(out_dir, overrides=()):
    paths = []
    summary = []
    for name, l_a, l_s in AP_SCALINGS:
        cfg, transport, oracle, diff = ap_gray_comparison(name, l_a, l_s, overrides)
        t = _tag_time(transport.t)
        p1 = os.path.join(out_dir, f"ap_gray_{name}_profile_t{t}.csv")
        _write_profile(p1, transport, cfg.mesh.centers)
        p2 = os.path.join(out_dir, f"ap_gray_{name}_oracle_t{t}.csv")
        write_csv(p2, ["x", "T"], [[x, T] for x, T in zip(cfg.mesh.centers, oracle.T)])
        paths.extend([p1, p2])
        summary.append([name, diff])
    p3 = os.path.join(out_dir, "ap_gray_summary.csv")
    write_csv(p3, ["scaling", "max_rel_diff_T"], summary)
    paths.append(p3)
    return paths


def ap_fddl_comparison(overrides=()):
    cfg = _config(ap_mapping("eps", "inv_eps"), overrides, stride=10**9)
    transport = run(cfg)[-1]
    oracle = fddl_run(cfg)[-1]
    diff_T = float(np.max(np.abs(transport.T - oracle.T)) / np.max(np.abs(oracle.T)))
    gmax = float(np.abs(oracle.rho).max())
    diffs_rho = []
    for g in range(cfg.grid.num_groups):
        denom = float(np.abs(oracle.rho[g]).max())
        if denom > 1e-12 * gmax:
            diffs_rho.append(float(np.abs(transport.rho[g] - oracle.rho[g]).max()) / denom)
        else:
            diffs_rho.append(float(np.abs(transport.rho[g] - oracle.rho[g]).max()) / (1e-12 * gmax))
    return cfg, transport, oracle, diff_T, diffs_rho


def run_ap_fddl(out_dir, overrides=()):
    cfg, transport, oracle, diff_T, diffs_rho = ap_fddl_comparison(overrides)
    t = _tag_time(transport.t)
    p1 = os.path.join(out_dir, f"ap_fddl_profile_t{t}.csv")
    _write_profile(p1, transport, cfg.mesh.centers)
    from .means import radiation_temperature

    Tr = radiation_temperature(oracle.rho, cfg.consts)
    p2 = os.path.join(out_dir, f"ap_fddl_oracle_t{t}.csv")
    header, rows = profile_rows(cfg.mesh.centers, oracle.T, np.atleast_1d(Tr), oracle.rho)
    write_csv(p2, header, rows)
    p3 = os.path.join(out_dir, "ap_fddl_summary.csv")
    rows = [["T", diff_T]] + [[f"rho_g{g + 1}", d] for g, d in enumerate(diffs_rho)]
    write_csv(p3, ["field", "max_rel_diff"], rows)
    return [p1, p2, p3]


def run_experiment(tag, out_dir=".", overrides=(), stride=None, reference=False):
    """Dispatch a preset tag; returns the list of files written."""
    os.makedirs(out_dir, exist_ok=True)
    if tag == "ex1":
        return run_ex1(out_dir, overrides, stride)
    if tag == "ex2":
        return run_ex2(out_dir, overrides, stride, reference=reference)
    if tag == "ex3":
        return run_ex3(out_dir, overrides, stride)
    if tag == "table1":
        return run_table1(out_dir)
    if tag == "coeffs":
        return run_coeffs(out_dir)
    if tag == "converge":
        return run_converge(out_dir, overrides)
    if tag == "ap-gray":
        return run_ap_gray(out_dir, overrides)
    if tag == "ap-fddl":
        return run_ap_fddl(out_dir, overrides)
    raise ConfigError(f"unknown experiment tag {tag!r}")
