"""Run diagnostics: energy budget, dissipation residual, entropy, separation.

One :class:`DiagnosticsRecord` per sample time; the CSV schema (exact column
order) is

    t, mass, energy_total, energy_kinetic, energy_gradient, energy_potential,
    dissipation_residual, entropy_l1, entropy_sq_log, entropy_cross,
    separation_delta, phi_min, phi_max, u_max, grad_phi_max, enstrophy

with a mandatory header row and floats printed with 17 significant digits
(so identical runs produce byte-identical files).

The energy is E = integral( rho(phi)|u|^2/2 + sigma*(|grad phi|^2/2 +
psi(phi)) ).  The dissipation residual checks the discrete shadow of the
energy identity

    dE/dt + integral nu(phi)|grad u|^2 + (sigma/gamma)*||d phi/dt
                                          + u . grad phi||^2 = 0,

whose terms pair exactly with the gradient-form viscous operator used by the
steppers; it converges to zero at first order in dt and is reported, not
enforced (the scheme guarantees the sign, the residual quantifies
consistency).  Entropy columns are NaN wherever the concentration touches
the singular endpoints (possible in transport runs, which lack the
mechanism that keeps it inside).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import Grid, ScalarField, VectorField
from .material import FluidParams
from .nsac import compute_vorticity
from .potential import PotentialParams

__all__ = [
    "DiagnosticsRecord",
    "EnergyParts",
    "energy",
    "dissipation_residual",
    "record",
    "write_csv",
    "read_csv",
    "separation_report",
    "SeparationReport",
    "trudinger_moser_probe",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "t", "mass", "energy_total", "energy_kinetic", "energy_gradient",
    "energy_potential", "dissipation_residual", "entropy_l1",
    "entropy_sq_log", "entropy_cross", "separation_delta", "phi_min",
    "phi_max", "u_max", "grad_phi_max", "enstrophy",
)

_SINGULAR_GUARD = 1.0 - 1e-15


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    energy_total: float
    energy_kinetic: float
    energy_gradient: float
    energy_potential: float
    dissipation_residual: float
    entropy_l1: float
    entropy_sq_log: float
    entropy_cross: float
    separation_delta: float
    phi_min: float
    phi_max: float
    u_max: float
    grad_phi_max: float
    enstrophy: float


@dataclass(frozen=True)
class EnergyParts:
    total: float
    kinetic: float
    gradient: float
    potential: float


def _masked_grad(g: Grid, vals):
    hat = g.to_hat(vals) * g.mask
    return g.from_hat(g.dx_hat(hat)), g.from_hat(g.dy_hat(hat))


def energy(u: VectorField | None, phi: ScalarField, fluids: FluidParams,
           pot: PotentialParams, mode: str = "singular") -> EnergyParts:
    """Grid quadrature of the kinetic, gradient, and potential parts."""
    g = phi.grid
    K = backend.kernels
    ca = g.cell_area
    if u is not None:
        rho_vals = K.interp_clamped(phi.values, fluids.rho1, fluids.rho2)
        kin = K.kinetic_sum(u.x_values, u.y_values, rho_vals) * ca
    else:
        kin = 0.0
    gx, gy = _masked_grad(g, phi.values)
    grad = 0.5 * fluids.sigma * K.gradsq_sum(gx, gy) * ca
    if mode == "regularized":
        pot_part = fluids.sigma * K.psi_reg_sum(phi.values, pot.theta, pot.theta0,
                                                pot.epsilon) * ca
    elif float(np.abs(phi.values).max()) <= 1.0:
        pot_part = fluids.sigma * K.psi_sum(phi.values, pot.theta, pot.theta0) * ca
    else:
        pot_part = math.nan
    return EnergyParts(kin + grad + pot_part, kin, grad, pot_part)


def dissipation_residual(prev, next_state, fluids: FluidParams,
                         pot: PotentialParams, dt: float,
                         mode: str = "singular") -> float:
    """Discrete energy-identity residual between two consecutive states.

    Vanishes at first order in dt for the viscous model at sigma = 1 (and for
    matched densities at any sigma); the viscous term drops out by itself in
    inviscid runs.
    """
    g = prev.phi.grid
    if not g.same_as(next_state.phi.grid):
        raise ValueError("states live on different grids")
    e_prev = energy(prev.u, prev.phi, fluids, pot, mode).total
    e_next = energy(next_state.u, next_state.phi, fluids, pot, mode).total

    visc = 0.0
    if max(fluids.nu1, fluids.nu2) > 0.0:
        K = backend.kernels
        nu_vals = K.interp_clamped(prev.phi.values, fluids.nu1, fluids.nu2)
        hx = g.to_hat(prev.u.x_values)
        hy = g.to_hat(prev.u.y_values)
        dxux = g.from_hat(g.dx_hat(hx))
        dyux = g.from_hat(g.dy_hat(hx))
        dxuy = g.from_hat(g.dx_hat(hy))
        dyuy = g.from_hat(g.dy_hat(hy))
        visc = float((nu_vals * (dxux**2 + dyux**2 + dxuy**2 + dyuy**2)).sum()) * g.cell_area

    gx, gy = _masked_grad(g, prev.phi.values)
    rate = (next_state.phi.values - prev.phi.values) / dt \
        + prev.u.x_values * gx + prev.u.y_values * gy
    ac = (fluids.sigma / fluids.gamma) * float((rate * rate).sum()) * g.cell_area
    return (e_next - e_prev) / dt + visc + ac


def record(t: float, u: VectorField | None, phi: ScalarField,
           fluids: FluidParams, pot: PotentialParams, mode: str = "singular",
           prev=None, dt: float | None = None,
           omega: ScalarField | None = None) -> DiagnosticsRecord:
    """Assemble one diagnostics row from a state (and optionally its predecessor)."""
    g = phi.grid
    parts = energy(u, phi, fluids, pot, mode)
    phi_min = float(phi.values.min())
    phi_max = float(phi.values.max())
    abs_max = max(abs(phi_min), abs(phi_max))

    if abs_max < _SINGULAR_GUARD:
        s1, s2, s3 = backend.kernels.entropy_sums(phi.values, pot.theta)
        ent = (s1 * g.cell_area, s2 * g.cell_area, s3 * g.cell_area)
    else:
        ent = (math.nan, math.nan, math.nan)

    if u is not None:
        u_max = backend.kernels.abs_max_vec(u.x_values, u.y_values)
    else:
        u_max = 0.0
    gx, gy = _masked_grad(g, phi.values)
    grad_max = backend.kernels.abs_max_vec(gx, gy)

    if omega is None and u is not None:
        omega = compute_vorticity(u)
    enstrophy = 0.5 * g.integrate(omega.values**2) if omega is not None else 0.0

    resid = 0.0
    if prev is not None:
        if dt is None:
            raise ValueError("dt required together with prev")
        resid = dissipation_residual(prev, _Pair(u, phi), fluids, pot, dt, mode)

    return DiagnosticsRecord(
        t=t, mass=g.mean(phi.values), energy_total=parts.total,
        energy_kinetic=parts.kinetic, energy_gradient=parts.gradient,
        energy_potential=parts.potential, dissipation_residual=resid,
        entropy_l1=ent[0], entropy_sq_log=ent[1], entropy_cross=ent[2],
        separation_delta=1.0 - abs_max, phi_min=phi_min, phi_max=phi_max,
        u_max=u_max, grad_phi_max=grad_max, enstrophy=enstrophy,
    )


class _Pair:
    def __init__(self, u, phi):
        self.u = u
        self.phi = phi


# -- CSV ---------------------------------------------------------------------


def format_row(rec: DiagnosticsRecord) -> str:
    return ",".join(f"{getattr(rec, c):.17g}" for c in CSV_COLUMNS)


def write_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(format_row(rec) + "\n")


def read_csv(path) -> list[DiagnosticsRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError("unexpected diagnostics CSV header")
        out = []
        for line in fh:
            vals = [float(v) for v in line.strip().split(",")]
            out.append(DiagnosticsRecord(*vals))
    return out


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    sigma_cut: float
    floor: float
    delta_inf: float
    time_of_inf: float
    separated: bool


def separation_report(records, sigma_cut: float = 1.0,
                      floor: float = 1e-3) -> SeparationReport:
    """Infimum of the separation margin 1 - max|phi| over t >= sigma_cut."""
    if not records:
        raise ValueError("empty run")
    tail = [r for r in records if r.t >= sigma_cut]
    if not tail:
        tail = [records[-1]]
    worst = min(tail, key=lambda r: r.separation_delta)
    return SeparationReport(sigma_cut, floor, worst.separation_delta, worst.t,
                            worst.separation_delta >= floor)


@dataclass(frozen=True)
class TrudingerMoserReport:
    samples: int
    max_value: float
    mean_value: float
    max_abs_f: float


def trudinger_moser_probe(grid: Grid, samples: int = 100, seed: int = 0,
                          band: int = 12) -> TrudingerMoserReport:
    """Quadrature of exp(4 pi f^2) over random mean-free fields with unit
    gradient norm.  Reported, not asserted: the exponential-integrability
    constant is domain-dependent and non-constructive."""
    rng = np.random.default_rng(seed)
    vals = []
    fmax = 0.0
    for _ in range(samples):
        f = _random_band_limited(grid, rng, band)
        f -= f.mean()
        gx, gy = grid.grad(f)
        gn = math.sqrt(grid.integrate(gx * gx + gy * gy))
        f /= gn
        fmax = max(fmax, float(np.abs(f).max()))
        q = grid.integrate(np.exp(np.minimum(4.0 * math.pi * f * f, 700.0)))
        vals.append(q)
    arr = np.array(vals)
    return TrudingerMoserReport(samples, float(arr.max()), float(arr.mean()), fmax)


def _random_band_limited(grid: Grid, rng, band: int):
    hat = np.zeros((grid.nx, grid.ny // 2 + 1), dtype=complex)
    ix = np.fft.fftfreq(grid.nx, 1.0 / grid.nx)
    iy = np.arange(grid.ny // 2 + 1)
    sel = (np.abs(ix)[:, None] <= band) & (iy[None, :] <= band)
    n = int(sel.sum())
    hat[sel] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return grid.from_hat(hat)
