"""Backward-Euler solvers for the two thick-opacity limit models.

Gray limit: d/dt (arc*T^4 + gamma*T) = d/dx [ (1/(3*sigma)) d/dx (arc*T^4) ]
with 1/sigma the C-scaled reciprocal mean opacity (gray_sigma) and
gamma = C_v/P0.  Frequency-dependent limit: per-group diffusion with the
reciprocal scattering mean weighted by dB/dT at the radiation
temperature, coupled to the temperature through the sigma1/sigma2
exchange terms.  Both run on the same half-node grid as the transport
stepper so asymptotic comparisons need no interpolation, preserve exact
equilibria, and conserve total energy under closed boundaries.
"""

from dataclasses import dataclass

import numpy as np

from .bandsolve import solve_banded_batch
from .constants import PhysicalConstants
from .means import group_coefficients, radiation_temperature
from .planck import LINE_NODES, LINE_WEIGHTS, group_planck, planck_samples, _coef
from .scaling import Scaling
from .solver import ConvergenceError, solve_coupled_temperature

_T_FLOOR = 1e-14
_UNIT_SCALING = Scaling(mode="nondimensional", epsilon=1.0, C=1.0, P0=1.0,
                        L_a=1.0, L_s=1.0)
_UNIT_CONSTS = PhysicalConstants.nondimensional()


def gray_sigma(T, x, opacity, scaling, consts):
    """Mean opacity of the gray limit:

    1/sigma = int [4 pi C / (L_a sigma_a + L_s sigma_s)] dB/dT d(eps)
              / (4 a_r c T^3),

    evaluated in the substitution variable eps/T so accuracy is uniform
    in temperature.  T and x may be arrays (broadcast together).
    """
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(T <= 0.0):
        raise ValueError("temperature must be strictly positive")
    x = np.broadcast_to(np.asarray(x, dtype=float), T.shape)
    eps = LINE_NODES[:, None] * T[None, :]
    live = eps > 0.0
    eps_safe = np.where(live, eps, 1.0)
    sa = opacity.sigma_a(x, eps_safe, T)
    ss = opacity.sigma_s(x, eps_safe, T)
    tot = scaling.L_a * sa + scaling.L_s * ss
    xq = LINE_NODES[:, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        db = np.where(live, xq**4 / (np.expm1(xq) * (-np.expm1(-xq))), 0.0)
        integrand = np.where((tot > 0.0) & live, db / np.where(tot > 0.0, tot, 1.0), 0.0)
    # dB/dT = coef * T^2 * x^4 e^x/(e^x-1)^2 with d(eps) = T dx
    num = 4.0 * np.pi * scaling.C * _coef(consts) * T**3 * (LINE_WEIGHTS @ integrand)
    inv_sigma = num / (4.0 * consts.arc * T**3)
    with np.errstate(divide="ignore"):
        sigma = np.where(inv_sigma > 0.0, 1.0 / np.where(inv_sigma > 0.0, inv_sigma, 1.0), np.inf)
    return sigma if sigma.size > 1 else float(sigma[0])


@dataclass
class GrayDiffusionState:
    T: np.ndarray
    t: float


@dataclass
class FddlState:
    rho: np.ndarray
    T: np.ndarray
    t: float


def _face_mean(cells):
    """Arithmetic mean of cell diffusivities on interior faces, zero ends."""
    faces = np.zeros(cells.shape[:-1] + (cells.shape[-1] + 1,))
    faces[..., 1:-1] = 0.5 * (cells[..., :-1] + cells[..., 1:])
    return faces


def _check_closed(bc):
    for side in (bc.left, bc.right):
        if side.kind == "vacuum":
            raise ValueError("vacuum boundaries are not defined for the "
                             "diffusion limit solvers")


def gray_diffusion_run(config):
    """Trajectory of GrayDiffusionState snapshots at the solver's stride."""
    _check_closed(config.bc)
    consts = config.consts
    sc = config.scaling
    dx = config.mesh.dx
    dt = config.dt
    arc = consts.arc
    gamma = consts.C_v / sc.P0
    x = config.mesh.centers
    T = config.initial_profile()
    if np.any(T <= 0.0):
        raise ValueError("initial temperature must be strictly positive")

    dirichlet = []
    for pos, side in ((0, config.bc.left), (-1, config.bc.right)):
        if side.kind == "planckian":
            dirichlet.append((pos, arc * side.T_b**4))

    def advance(T_old):
        T_new = T_old.copy()
        for _ in range(config.max_outer):
            D = 1.0 / (3.0 * gray_sigma(T_new, x, config.opacity, sc, consts))
            Dface = _face_mean(D)
            T_inner = T_new.copy()
            # Newton on F(T) = (u + gamma T - u_old - gamma T_old)/dt - div
            for _ in range(60):
                u = arc * T_inner**4
                du = 4.0 * arc * T_inner**3
                flux_hi = Dface[1:] * (np.roll(u, -1) - u)
                flux_hi[-1] = 0.0
                flux_lo = Dface[:-1] * (u - np.roll(u, 1))
                flux_lo[0] = 0.0
                F = ((u - arc * T_old**4) + gamma * (T_inner - T_old)) / dt \
                    - (flux_hi - flux_lo) / dx**2
                diag = (du + gamma) / dt + (Dface[1:] + Dface[:-1]) / dx**2 * du
                upper = -Dface[1:-1] / dx**2 * du[1:]
                lower = -Dface[1:-1] / dx**2 * du[:-1]
                for pos, ub in dirichlet:
                    F[pos] -= 2.0 * D[pos] * (ub - u[pos]) / dx**2
                    diag[pos] += 2.0 * D[pos] / dx**2 * du[pos]
                ab = np.zeros((1, 3, T_inner.size))
                ab[0, 0, 1:] = upper
                ab[0, 1, :] = diag
                ab[0, 2, :-1] = lower
                delta = solve_banded_batch(ab, -F[None, :], 1, 1)[0]
                T_try = T_inner + delta
                while np.any(T_try <= 0.0):
                    delta *= 0.5
                    T_try = T_inner + delta
                    if np.max(np.abs(delta)) < 1e-300:
                        raise ConvergenceError("gray diffusion Newton collapsed")
                T_inner = T_try
                if np.max(np.abs(delta)) <= 1e-13 * max(1.0, float(np.max(T_inner))):
                    break
            change = float(np.max(np.abs(T_inner - T_new)))
            T_new = T_inner
            if change <= config.tol_T:
                return T_new
        raise ConvergenceError(
            f"gray diffusion Picard stalled (last change {change:.3e})",
            residual=change)

    snaps = [GrayDiffusionState(T=T.copy(), t=0.0)]
    n_steps = max(1, int(round(config.t_end / dt)))
    for k in range(1, n_steps + 1):
        T = advance(T)
        if k % config.snapshot_stride == 0 or k == n_steps:
            snaps.append(GrayDiffusionState(T=T.copy(), t=k * dt))
    return snaps


def fddl_sigma_s_prime_inv(T_r, grid, opacity, x=0.0, T_material=None):
    """Reciprocal scattering mean 1/sigma'_s per (group, cell):
    int (1/sigma_s) dB/dT(T_r) / int dB/dT(T_r), falling back to the
    plain reciprocal group mean where the weight underflows."""
    T_r = np.atleast_1d(np.asarray(T_r, dtype=float))
    if T_material is None:
        T_material = T_r
    x = np.broadcast_to(np.asarray(x, dtype=float), T_r.shape)
    eps = grid.nodes[..., None]
    ss = opacity.sigma_s(x, eps, T_material)
    if np.any(np.broadcast_to(ss, eps.shape[:2] + T_r.shape) <= 0.0):
        raise ValueError("the frequency-dependent diffusion model needs "
                         "strictly positive scattering")
    db = planck_samples(eps, T_r, _UNIT_CONSTS, derivative=True)
    num = grid.integrate(db / ss)
    den = grid.integrate(db)
    mean_s = grid.integrate(np.broadcast_to(ss, eps.shape[:2] + T_r.shape)) \
        / grid.widths[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 1.0 / mean_s)
    return out


def fddl_run(config):
    """Trajectory of FddlState snapshots for the per-group diffusion model."""
    _check_closed(config.bc)
    consts = config.consts
    sc = config.scaling
    grid = config.grid
    dx = config.mesh.dx
    dt = config.dt
    gamma = consts.C_v / sc.P0
    kappa = sc.C * sc.L_a          # exchange coefficient, O(1) in the limit
    coefD = sc.C / (3.0 * sc.L_s)  # diffusion prefactor, O(1) in the limit
    x = config.mesh.centers
    G = grid.num_groups

    T = config.initial_profile()
    if np.any(T <= 0.0):
        raise ValueError("initial temperature must be strictly positive")
    rho, _ = group_planck(T, grid, consts)

    dirichlet = []
    for pos, side in ((0, config.bc.left), (-1, config.bc.right)):
        if side.kind == "planckian":
            dirichlet.append((pos, group_planck(side.T_b, grid, consts)[0]))

    def advance(rho_old, T_old):
        rho_k = rho_old.copy()
        T_k = T_old.copy()
        # outer Picard updates the T_r-weighted diffusivities; the inner
        # coupled Newton treats diffusion and exchange implicitly at
        # frozen coefficients (lagging them across the whole step would
        # be an explicit diffusion iteration and diverges when
        # D dt/dx^2 is large)
        for _ in range(config.max_outer):
            Tr = np.maximum(radiation_temperature(np.maximum(rho_k, 0.0), consts),
                            _T_FLOOR)
            cf = group_coefficients(T_k, Tr, grid, config.opacity, config.scheme,
                                    _UNIT_SCALING, x=x)
            s1, s2 = cf.sigma1_a, cf.sigma2_a
            inv_sp = fddl_sigma_s_prime_inv(Tr, grid, config.opacity, x=x,
                                            T_material=T_k)
            D = coefD * inv_sp
            Dface = _face_mean(D)

            diag = 1.0 / dt + kappa * s1 + (Dface[:, 1:] + Dface[:, :-1]) / dx**2
            upper = -Dface[:, 1:-1] / dx**2
            lower = upper.copy()
            rhs0 = rho_old / dt
            bc_diag = np.zeros_like(diag)
            for pos, rho_b in dirichlet:
                bc_diag[:, pos] = 2.0 * D[:, pos] / dx**2
                rhs0[:, pos] = rhs0[:, pos] + 2.0 * D[:, pos] * rho_b / dx**2
            diag = diag + bc_diag

            ab = np.zeros((G, 3, T_old.size))
            ab[:, 0, 1:] = upper
            ab[:, 1, :] = diag
            ab[:, 2, :-1] = lower

            def divergence(rho):
                flux_hi = Dface[:, 1:] * np.concatenate(
                    [rho[:, 1:] - rho[:, :-1], np.zeros((G, 1))], axis=1)
                flux_lo = Dface[:, :-1] * np.concatenate(
                    [np.zeros((G, 1)), rho[:, 1:] - rho[:, :-1]], axis=1)
                div = -(flux_hi - flux_lo) / dx**2
                for pos, rho_b in dirichlet:
                    div[:, pos] -= 2.0 * D[:, pos] * (rho_b - rho[:, pos]) / dx**2
                return div

            rho_new, T_new, _ = solve_coupled_temperature(
                T_old, rho_old, ab, rhs0, emit=kappa * s2, absorb=kappa * s1,
                gamma_dt=gamma / dt, time_coef=1.0 / dt, divergence=divergence,
                grid=grid, consts=consts, tol=config.tol_T,
                max_outer=config.max_outer)
            change = max(float(np.max(np.abs(T_new - T_k))),
                         float(np.max(np.abs(rho_new - rho_k)))
                         / max(float(np.max(np.abs(rho_new))), 1e-300))
            rho_k = rho_new
            T_k = T_new
            if change <= max(config.tol_T, 1e-13):
                return rho_k, T_k
        raise ConvergenceError(
            f"frequency-dependent diffusion Picard stalled (last change {change:.3e})",
            residual=change)

    snaps = [FddlState(rho=rho.copy(), T=T.copy(), t=0.0)]
    n_steps = max(1, int(round(config.t_end / dt)))
    for k in range(1, n_steps + 1):
        rho, T = advance(rho, T)
        if k % config.snapshot_stride == 0 or k == n_steps:
            snaps.append(FddlState(rho=rho.copy(), T=T.copy(), t=k * dt))
    return snaps
