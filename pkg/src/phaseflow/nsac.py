"""Mass-conserving Navier-Stokes-Allen-Cahn stepper (unmatched density/viscosity).

The concentration step is backward Euler with a convex split: the singular
convex part of the potential is implicit (damped Newton, every iterate
strictly inside (-1, 1)), the concave quadratic part explicit.  A scalar
multiplier is solved alongside Newton so the grid mean of phi is conserved
exactly, not just to O(dt).

The velocity step is a semi-implicit projection step: a constant-coefficient
viscous operator ``nu_split * lap`` is implicit, the variable-viscosity
remainder, advection, and the capillary force explicit (divided pointwise by
the density), and the result is Leray-projected, hence spectrally
divergence-free.  The pressure is never materialized.

The viscous term is the gradient form ``div(nu(phi) grad u)`` (equal to
``nu*lap u`` for constant viscosity), whose exact energy pairing is
``integral nu |grad u|^2``; see ``diagnostics.dissipation_residual``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .grid import Grid, ScalarField, VectorField
from .material import FluidParams
from .potential import PotentialParams

__all__ = [
    "SimState",
    "NsacSchemeParams",
    "StepFailureError",
    "chemical_potential",
    "xi_multiplier",
    "korteweg_force",
    "step_phi",
    "step_velocity",
    "step",
    "step_matched",
    "compute_vorticity",
]

_BOUND_GUARD = 1.0 - 1e-14


class StepFailureError(RuntimeError):
    """Implicit solve failed; carries the last residual norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class NsacSchemeParams:
    dt: float
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    nu_split: float | None = None  # default (nu1 + nu2) / 2, resolved per fluids

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.newton_tol <= 0.0 or self.newton_max_iter < 1:
            raise ValueError("bad Newton parameters")


def resolve_nu_split(scheme: NsacSchemeParams, fluids: FluidParams) -> float:
    ns = scheme.nu_split if scheme.nu_split is not None else 0.5 * (fluids.nu1 + fluids.nu2)
    if ns < 0.5 * max(fluids.nu1, fluids.nu2):
        raise ValueError("nu_split below max(nu1, nu2)/2 violates the stability heuristic")
    return ns


@dataclass
class SimState:
    """Time, velocity, concentration and the physical parameters of a run."""

    t: float
    u: VectorField
    phi: ScalarField
    potential: PotentialParams
    fluids: FluidParams
    mode: str = "singular"  # or "regularized"

    def __post_init__(self):
        if self.mode not in ("singular", "regularized"):
            raise ValueError("mode must be 'singular' or 'regularized'")
        if not self.u.grid.same_as(self.phi.grid):
            raise ValueError("u and phi live on different grids")

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    def validate(self, tol: float = 1e-12) -> None:
        g = self.grid
        div = g.div(self.u.x_values, self.u.y_values)
        umax = max(float(np.abs(self.u.x_values).max()),
                   float(np.abs(self.u.y_values).max()), 1.0)
        if float(np.abs(div).max()) > tol * umax:
            raise ValueError("velocity is not spectrally divergence-free")
        if self.mode == "singular" and float(np.abs(self.phi.values).max()) >= 1.0:
            raise ValueError("singular mode requires max|phi| < 1")


# -- pointwise nonlinearity dispatch -------------------------------------------


def _fprime(vals, pot: PotentialParams, mode: str):
    if mode == "singular":
        return backend.kernels.convex_prime(vals, pot.theta)
    return backend.kernels.reg_prime(vals, pot.theta, pot.epsilon)


def _fsecond(vals, pot: PotentialParams, mode: str):
    if mode == "singular":
        return backend.kernels.convex_second(vals, pot.theta)
    return backend.kernels.reg_second(vals, pot.theta, pot.epsilon)


# -- field operations ----------------------------------------------------------


def chemical_potential(phi: ScalarField, pot: PotentialParams,
                       mode: str = "singular") -> ScalarField:
    """mu = -lap(phi) + psi'(phi), dealiased."""
    g = phi.grid
    vals = phi.values
    if mode == "singular" and float(np.abs(vals).max()) >= 1.0:
        from .potential import SingularArgumentError

        raise SingularArgumentError("chemical potential needs max|phi| < 1")
    mu = -g.lap(vals) + _fprime(vals, pot, mode) - pot.theta0 * vals
    return ScalarField(g, g.dealias_values(mu))


def xi_multiplier(mu: ScalarField, u: VectorField, phi: ScalarField,
                  fluids: FluidParams) -> float:
    """Mean of mu + rho'(phi)|u|^2/2 (the mass-conservation multiplier)."""
    g = mu.grid
    if not (g.same_as(u.grid) and g.same_as(phi.grid)):
        raise ValueError("fields live on different grids")
    rp = 0.5 * (fluids.rho1 - fluids.rho2)
    ke = 0.5 * (u.x_values**2 + u.y_values**2)
    return g.mean(mu.values + rp * ke)


def korteweg_force(phi: ScalarField, sigma: float) -> VectorField:
    """Capillary force -sigma * lap(phi) * grad(phi), dealiased.

    The omitted gradient part 0.5*grad(|grad phi|^2) is absorbed into the
    pressure and removed by the Leray projection.
    """
    g = phi.grid
    hat = g.to_hat(phi.values) * g.mask
    gx = g.from_hat(g.dx_hat(hat))
    gy = g.from_hat(g.dy_hat(hat))
    lap = g.from_hat(g.lap_hat(hat))
    fx = g.dealias_values(-sigma * lap * gx)
    fy = g.dealias_values(-sigma * lap * gy)
    return VectorField(g, fx, fy)


# -- implicit concentration step ----------------------------------------------


def _pcg_hat(g: Grid, f2v, a: float, rhs_hat, x_hat, rtol: float, maxit: int = 400):
    """CG on (I - a*lap + a*diag(f2v)) in spectral variables.

    The operator is SPD in the Parseval inner product; the constant-shift
    part (1 + a*(k^2 + mean f2v)) is diagonal here and serves as the
    preconditioner for free.  Returns the solution spectrum and its physical
    samples (one transform saved for the caller).
    """
    w = g.hat_weight
    shift = 1.0 + a * g.k2
    pre = 1.0 / (shift + a * float(f2v.mean()))

    def dot(u, v):
        return float((w * (u.real * v.real + u.imag * v.imag)).sum())

    def apply_j(p_hat):
        p_phys = g.from_hat(p_hat)
        return shift * p_hat + g.to_hat((a * f2v) * p_phys), p_phys

    if x_hat is None:  # zero initial guess: skip the operator application
        x_hat = np.zeros_like(rhs_hat)
        x_phys = np.zeros((g.nx, g.ny))
        r = rhs_hat.copy()
    else:
        jx, x_phys = apply_j(x_hat)
        r = rhs_hat - jx
    target = rtol * math.sqrt(dot(rhs_hat, rhs_hat)) + 1e-300
    z = r * pre
    p = z.copy()
    rz = dot(r, z)
    for _ in range(maxit):
        if math.sqrt(dot(r, r)) <= target:
            break
        jp, p_phys = apply_j(p)
        alpha = rz / dot(p, jp)
        x_hat = x_hat + alpha * p
        x_phys = x_phys + alpha * p_phys
        r -= alpha * jp
        z = r * pre
        rz_new = dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x_hat, x_phys


def _solve_phi_implicit(g: Grid, phi_n, b, m0: float, a: float, xi0: float,
                        pot: PotentialParams, mode: str, tol: float, maxit: int):
    """Solve phi + a*(-lap phi + F'(phi) - xi) = b with mean(phi) = m0."""
    K = backend.kernels
    phi = phi_n.copy()
    phi_hat = g.to_hat(phi)
    xi = xi0
    ones_hat = g.to_hat(np.ones_like(phi))
    z2_hat = None
    res_norm = np.inf
    for _ in range(maxit):
        fp = _fprime(phi, pot, mode)
        lap_phi = g.from_hat(g.lap_hat(phi_hat))
        r = K.newton_residual(phi, lap_phi, b, a, xi, fp)
        res_norm = float(np.abs(r).max())
        if res_norm <= tol:
            phi += m0 - g.mean(phi)
            return phi, xi, res_norm
        f2v = _fsecond(phi, pot, mode)
        z1_hat, z1 = _pcg_hat(g, f2v, a, -g.to_hat(r), None, rtol=1e-6)
        if z2_hat is None:
            z2_hat = ones_hat / (1.0 + a * (g.k2 + float(f2v.mean())))
        z2_hat, z2 = _pcg_hat(g, f2v, a, ones_hat, z2_hat, rtol=1e-6)
        mz2 = g.mean(z2)
        dxi = (m0 - g.mean(phi) - g.mean(z1)) / (a * mz2)
        dphi = z1 + (a * dxi) * z2
        if mode == "singular":
            amax = K.max_interior_step(phi, dphi, -_BOUND_GUARD, _BOUND_GUARD)
        else:
            amax = np.inf
        alpha = 1.0
        while alpha >= amax:  # bisect toward the previous iterate
            alpha *= 0.5
            if alpha < 1e-13:
                raise StepFailureError("Newton step trapped at the bound", res_norm)
        phi = phi + alpha * dphi
        phi_hat = phi_hat + alpha * (z1_hat + (a * dxi) * z2_hat)
        xi += alpha * dxi
    raise StepFailureError("Newton did not converge", res_norm)


def _phi_step_arrays(state: SimState, dt: float, rho_prime: float):
    """Explicit data (b, m0, a, xi0) of the implicit concentration step."""
    g = state.grid
    pot = state.potential
    gamma = state.fluids.gamma
    phi = state.phi.values
    ux, uy = state.u.x_values, state.u.y_values
    a = dt * gamma

    hat = g.to_hat(phi) * g.mask
    gx = g.from_hat(g.dx_hat(hat))
    gy = g.from_hat(g.dy_hat(hat))
    adv = g.dealias_values(ux * gx + uy * gy)
    if rho_prime != 0.0:
        kin = 0.5 * rho_prime * g.dealias_values(ux * ux + uy * uy)
    else:
        kin = 0.0
    b = phi - dt * adv + a * (pot.theta0 * phi - kin)
    m0 = g.mean(phi)
    fp = _fprime(phi, pot, state.mode)
    xi0 = g.mean(fp) - pot.theta0 * m0
    if rho_prime != 0.0:
        xi0 += g.mean(kin)
    return b, m0, a, xi0


def step_phi(state: SimState, scheme: NsacSchemeParams) -> ScalarField:
    """Advance the concentration by one implicit mass-conserving step."""
    rp = 0.5 * (state.fluids.rho1 - state.fluids.rho2)
    b, m0, a, xi0 = _phi_step_arrays(state, scheme.dt, rp)
    phi_new, _, _ = _solve_phi_implicit(
        state.grid, state.phi.values, b, m0, a, xi0, state.potential,
        state.mode, scheme.newton_tol, scheme.newton_max_iter)
    return ScalarField(state.grid, phi_new)


# -- velocity step --------------------------------------------------------------


def _velocity_update(g: Grid, ux, uy, phi_old, phi_new, fluids: FluidParams,
                     dt: float, nu_split: float, rho_vals):
    """Shared semi-implicit projection update; rho_vals may be scalar or array."""
    hat_ux = g.to_hat(ux)
    hat_uy = g.to_hat(uy)
    mx = hat_ux * g.mask
    my = hat_uy * g.mask
    dxux = g.from_hat(g.dx_hat(mx))
    dyux = g.from_hat(g.dy_hat(mx))
    dxuy = g.from_hat(g.dx_hat(my))
    dyuy = g.from_hat(g.dy_hat(my))
    adv_x = ux * dxux + uy * dyux
    adv_y = ux * dxuy + uy * dyuy

    ph = g.to_hat(phi_new) * g.mask
    gx = g.from_hat(g.dx_hat(ph))
    gy = g.from_hat(g.dy_hat(ph))
    lap_phi = g.from_hat(g.lap_hat(ph))
    kort_x = -fluids.sigma * lap_phi * gx
    kort_y = -fluids.sigma * lap_phi * gy

    matched_nu = fluids.nu1 == fluids.nu2
    if matched_nu and nu_split == fluids.nu1:
        # implicit operator carries the whole viscous term
        gx_force = -adv_x + kort_x / rho_vals
        gy_force = -adv_y + kort_y / rho_vals
    else:
        lap_ux = g.from_hat(g.lap_hat(hat_ux))
        lap_uy = g.from_hat(g.lap_hat(hat_uy))
        if matched_nu:
            visc_x = fluids.nu1 * lap_ux
            visc_y = fluids.nu1 * lap_uy
        else:
            # div(nu grad u) = nu lap u + nu'(phi) grad(phi) . grad(u)
            nu_vals = backend.kernels.interp_clamped(phi_old, fluids.nu1, fluids.nu2)
            nup = 0.5 * (fluids.nu1 - fluids.nu2)
            po = g.to_hat(phi_old) * g.mask
            gxo = g.from_hat(g.dx_hat(po))
            gyo = g.from_hat(g.dy_hat(po))
            visc_x = nu_vals * lap_ux + nup * (gxo * dxux + gyo * dyux)
            visc_y = nu_vals * lap_uy + nup * (gxo * dxuy + gyo * dyuy)
        gx_force = -adv_x + (visc_x + kort_x) / rho_vals - nu_split * lap_ux
        gy_force = -adv_y + (visc_y + kort_y) / rho_vals - nu_split * lap_uy

    denom = 1.0 + dt * nu_split * g.k2
    sx = (hat_ux + dt * g.to_hat(gx_force)) * g.mask / denom
    sy = (hat_uy + dt * g.to_hat(gy_force)) * g.mask / denom
    px, py = g.leray_hat(sx, sy)
    return g.from_hat(px), g.from_hat(py)


def step_velocity(state: SimState, phi_new: ScalarField,
                  scheme: NsacSchemeParams) -> VectorField:
    """Advance the velocity using the already-updated concentration."""
    g = state.grid
    fl = state.fluids
    nu_split = resolve_nu_split(scheme, fl)
    rho_vals = backend.kernels.interp_clamped(state.phi.values, fl.rho1, fl.rho2)
    vx, vy = _velocity_update(g, state.u.x_values, state.u.y_values,
                              state.phi.values, phi_new.values, fl,
                              scheme.dt, nu_split, rho_vals)
    return VectorField(g, vx, vy)


def step(state: SimState, scheme: NsacSchemeParams) -> SimState:
    """One full time step: concentration first, then velocity."""
    phi_new = step_phi(state, scheme)
    u_new = step_velocity(state, phi_new, scheme)
    return replace(state, t=state.t + scheme.dt, u=u_new, phi=phi_new)


def step_matched(state: SimState, scheme: NsacSchemeParams) -> SimState:
    """Stepper hard-coded for matched densities (rho constant, multiplier = mean mu)."""
    fl = state.fluids
    if not fl.matched_density:
        raise ValueError("matched stepper requires rho1 == rho2")
    b, m0, a, xi0 = _phi_step_arrays(state, scheme.dt, rho_prime=0.0)
    phi_new, _, _ = _solve_phi_implicit(
        state.grid, state.phi.values, b, m0, a, xi0, state.potential,
        state.mode, scheme.newton_tol, scheme.newton_max_iter)
    nu_split = resolve_nu_split(scheme, fl)
    vx, vy = _velocity_update(state.grid, state.u.x_values, state.u.y_values,
                              state.phi.values, phi_new, fl, scheme.dt,
                              nu_split, fl.rho1)
    return replace(state, t=state.t + scheme.dt,
                   u=VectorField(state.grid, vx, vy),
                   phi=ScalarField(state.grid, phi_new))


def compute_vorticity(u: VectorField) -> ScalarField:
    """curl(u) = d(uy)/dx - d(ux)/dy."""
    g = u.grid
    w = g.from_hat(g.dx_hat(g.to_hat(u.y_values)) - g.dy_hat(g.to_hat(u.x_values)))
    return ScalarField(g, w)
