"""Inviscid mass-conserving dynamics in vorticity-streamfunction form.

State is (omega, phi) with u recovered from the mean-free vorticity through a
Poisson solve: psi solves lap(psi) = -omega and u = (d psi/dy, -d psi/dx).
The vorticity equation is

    d omega/dt + u . grad omega = grad(mu) . perp(grad phi),

with perp(v) = (v2, -v1); the concentration evolves by the same implicit
mass-conserving step as the viscous model with the kinetic coupling absent
(the multiplier reduces to the mean chemical potential).  The vorticity is
advanced by an explicit two-stage Runge-Kutta scheme in the advective part,
with the capillary forcing evaluated from the updated concentration and held
fixed across the stages.  A CFL monitor warns when max|u| dt / dx exceeds 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, ScalarField, VectorField
from .nsac import NsacSchemeParams, _phi_step_arrays, _solve_phi_implicit, chemical_potential
from .material import FluidParams
from .potential import PotentialParams

__all__ = ["EulerState", "velocity_from_vorticity", "vorticity_rhs", "step"]


@dataclass
class EulerState:
    t: float
    omega: ScalarField
    phi: ScalarField
    potential: PotentialParams
    mode: str = "singular"

    def __post_init__(self):
        if not self.omega.grid.same_as(self.phi.grid):
            raise ValueError("omega and phi live on different grids")

    @property
    def grid(self) -> Grid:
        return self.omega.grid


def velocity_from_vorticity(omega: ScalarField) -> VectorField:
    """Streamfunction solve; requires mean-free vorticity (torus compatibility)."""
    g = omega.grid
    scale = float(np.abs(omega.values).max()) or 1.0
    if abs(g.mean(omega.values)) > 1e-12 * scale:
        raise ValueError("vorticity must be mean-free on the torus")
    psi_hat = g.inv_lap_zero_mean_hat(-g.to_hat(omega.values))
    ux = g.from_hat(g.dy_hat(psi_hat))
    uy = -g.from_hat(g.dx_hat(psi_hat))
    return VectorField(g, ux, uy)


def _coupling_force(g: Grid, phi_vals, pot: PotentialParams, mode: str, sigma: float):
    """sigma * grad(mu) . perp(grad phi), dealiased."""
    phi_field = ScalarField(g, phi_vals)
    mu = chemical_potential(phi_field, pot, mode)
    mh = g.to_hat(mu.values) * g.mask
    ph = g.to_hat(phi_vals) * g.mask
    mux = g.from_hat(g.dx_hat(mh))
    muy = g.from_hat(g.dy_hat(mh))
    gx = g.from_hat(g.dx_hat(ph))
    gy = g.from_hat(g.dy_hat(ph))
    # perp(grad phi) = (d phi/dy, -d phi/dx)
    return sigma * g.dealias_values(mux * gy - muy * gx)


def _advection(g: Grid, omega_vals):
    """-u . grad omega for the velocity induced by omega, dealiased."""
    oh = g.to_hat(omega_vals)
    psi_hat = g.inv_lap_zero_mean_hat(-oh)
    ux = g.from_hat(g.dy_hat(psi_hat))
    uy = -g.from_hat(g.dx_hat(psi_hat))
    moh = oh * g.mask
    ox = g.from_hat(g.dx_hat(moh))
    oy = g.from_hat(g.dy_hat(moh))
    return -g.dealias_values(ux * ox + uy * oy)


def vorticity_rhs(state: EulerState, sigma: float = 1.0) -> ScalarField:
    """-u . grad omega + sigma * grad(mu) . perp(grad phi)."""
    g = state.grid
    rhs = _advection(g, state.omega.values)
    rhs = rhs + _coupling_force(g, state.phi.values, state.potential, state.mode, sigma)
    return ScalarField(g, rhs)


def step(state: EulerState, dt: float, sigma: float = 1.0,
         gamma: float = 1.0, scheme: NsacSchemeParams | None = None) -> EulerState:
    """Advance (omega, phi) by dt; phi implicit, omega explicit RK2."""
    g = state.grid
    if scheme is None:
        scheme = NsacSchemeParams(dt=dt)
    fluids = FluidParams(rho1=1.0, rho2=1.0, nu1=0.0, nu2=0.0, sigma=sigma, gamma=gamma)
    pseudo = _PhiCarrier(state, fluids)
    b, m0, a, xi0 = _phi_step_arrays(pseudo, dt, rho_prime=0.0)
    phi_new, _, _ = _solve_phi_implicit(g, state.phi.values, b, m0, a, xi0,
                                        state.potential, state.mode,
                                        scheme.newton_tol, scheme.newton_max_iter)

    u = velocity_from_vorticity(state.omega)
    umax = float(np.sqrt(u.x_values**2 + u.y_values**2).max())
    cfl = umax * dt / min(g.dx, g.dy)
    if cfl > 1.0:
        warnings.warn(f"CFL number {cfl:.2f} exceeds 1; explicit vorticity step "
                      "is likely unstable", RuntimeWarning, stacklevel=2)

    force = _coupling_force(g, phi_new, state.potential, state.mode, sigma)
    w = state.omega.values
    k1 = _advection(g, w) + force
    w1 = w + dt * k1
    k2 = _advection(g, w1) + force
    w_new = w + 0.5 * dt * (k1 + k2)
    w_new = w_new - w_new.mean()  # keep the Poisson solve compatible

    return replace(state, t=state.t + dt,
                   omega=ScalarField(g, w_new),
                   phi=ScalarField(g, phi_new))


class _PhiCarrier:
    """Adapter giving the shared concentration step the fields it reads."""

    def __init__(self, state: EulerState, fluids: FluidParams):
        self.grid = state.grid
        self.potential = state.potential
        self.fluids = fluids
        self.phi = state.phi
        self.u = velocity_from_vorticity(state.omega)
        self.mode = state.mode
