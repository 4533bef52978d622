"""Pure transport of the concentration (no interfacial relaxation).

The concentration is advected pseudo-spectrally with a three-stage
strong-stability-preserving Runge-Kutta scheme; the velocity uses the same
semi-implicit projection step as the relaxed model, forced by the capillary
stress.  Without relaxation nothing controls interface steepening, so runs
are expected to degrade: a monitor stops the step with a gradient blow-up
error once max|grad phi| exceeds a configured ceiling.

Note on the time scheme: a two-stage scheme amplifies purely advective modes
(|R(iy)| > 1), which destroys the L2 monotonicity this module reports; the
three-stage scheme is dissipative on the imaginary axis up to CFL sqrt(3),
so the L2 norm of phi can only decay (through truncation and the tiny
time-integration damping).
"""

from __future__ import annotations

import warnings
from dataclasses import replace

import numpy as np

from .grid import ScalarField
from .nsac import NsacSchemeParams, SimState, step_velocity

__all__ = ["GradientBlowupError", "step", "grad_inf_norm"]


class GradientBlowupError(RuntimeError):
    """Interface gradient exceeded the configured ceiling."""

    def __init__(self, grad_max: float, ceiling: float, t: float):
        super().__init__(f"gradient blow-up: max|grad phi| = {grad_max:.3e} "
                         f"exceeds ceiling {ceiling:.3e} at t = {t:.6g}")
        self.grad_max = grad_max
        self.ceiling = ceiling
        self.t = t


def grad_inf_norm(phi: ScalarField) -> float:
    g = phi.grid
    hat = g.to_hat(phi.values)
    gx = g.from_hat(g.dx_hat(hat))
    gy = g.from_hat(g.dy_hat(hat))
    return float(np.sqrt(gx * gx + gy * gy).max())


def _advect(g, ux, uy, phi_vals):
    hat = g.to_hat(phi_vals) * g.mask
    gx = g.from_hat(g.dx_hat(hat))
    gy = g.from_hat(g.dy_hat(hat))
    return -g.dealias_values(ux * gx + uy * gy)


def advance_phi(g, ux, uy, phi_vals, dt):
    """Three-stage advection of phi by a frozen velocity (one time step)."""
    k1 = phi_vals + dt * _advect(g, ux, uy, phi_vals)
    k2 = 0.75 * phi_vals + 0.25 * (k1 + dt * _advect(g, ux, uy, k1))
    return (phi_vals + 2.0 * (k2 + dt * _advect(g, ux, uy, k2))) / 3.0


def step(state: SimState, scheme: NsacSchemeParams,
         grad_ceiling: float | None = None) -> SimState:
    """One transported step; raises GradientBlowupError past the ceiling."""
    g = state.grid
    dt = scheme.dt
    ux, uy = state.u.x_values, state.u.y_values

    umax = float(np.sqrt(ux * ux + uy * uy).max())
    if umax * dt / min(g.dx, g.dy) > np.sqrt(3.0):
        warnings.warn("advective CFL exceeds sqrt(3); transport step may amplify",
                      RuntimeWarning, stacklevel=2)

    phi_field = ScalarField(g, advance_phi(g, ux, uy, state.phi.values, dt))

    if grad_ceiling is not None:
        gmax = grad_inf_norm(phi_field)
        if gmax > grad_ceiling:
            raise GradientBlowupError(gmax, grad_ceiling, state.t + dt)

    u_new = step_velocity(state, phi_field, scheme)
    return replace(state, t=state.t + dt, u=u_new, phi=phi_field)
