"""Concentration-dependent density and viscosity (linear interpolation).

rho(s) = rho1*(1+s)/2 + rho2*(1-s)/2 and likewise for nu, so s = +1 is pure
fluid 1 and s = -1 pure fluid 2.  Inputs are clamped to [-1, 1] before
interpolating; the regularized solver mode can produce excursions outside
the physical range, and the coefficients must stay inside [min, max] for the
energy to remain coercive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend

__all__ = ["FluidParams", "rho", "rho_prime", "rho_second", "nu", "nu_prime",
           "smallness_check", "SmallnessReport"]


@dataclass(frozen=True)
class FluidParams:
    rho1: float = 1.0
    rho2: float = 1.0
    nu1: float = 0.0
    nu2: float = 0.0
    sigma: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if min(self.rho1, self.rho2) <= 0.0:
            raise ValueError("densities must be positive")
        if min(self.nu1, self.nu2) < 0.0:
            raise ValueError("viscosities must be non-negative")
        if self.sigma <= 0.0 or self.gamma <= 0.0:
            raise ValueError("sigma and gamma must be positive")

    @property
    def rho_star(self) -> float:
        return min(self.rho1, self.rho2)

    @property
    def nu_star(self) -> float:
        return min(self.nu1, self.nu2)

    @property
    def matched_density(self) -> bool:
        return self.rho1 == self.rho2


def _interp(s, v1, v2):
    s = np.asarray(s, dtype=float)
    if s.ndim == 2:
        return backend.kernels.interp_clamped(s, v1, v2)
    sc = np.clip(s, -1.0, 1.0)
    out = v1 * (0.5 * (1.0 + sc)) + v2 * (0.5 * (1.0 - sc))
    return out if out.ndim else float(out)


def rho(s, p: FluidParams):
    return _interp(s, p.rho1, p.rho2)


def rho_prime(s, p: FluidParams):
    out = np.full_like(np.asarray(s, dtype=float), 0.5 * (p.rho1 - p.rho2))
    return out if out.ndim else float(out)


def rho_second(s, p: FluidParams):
    out = np.zeros_like(np.asarray(s, dtype=float))
    return out if out.ndim else float(out)


def nu(s, p: FluidParams):
    return _interp(s, p.nu1, p.nu2)


def nu_prime(s, p: FluidParams):
    out = np.full_like(np.asarray(s, dtype=float), 0.5 * (p.nu1 - p.nu2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SmallnessReport:
    """Diagnostic comparison of |rho'| against 4*pi / (C2 * R0^2)."""

    rho_prime_abs: float
    threshold: float
    c2: float
    r0: float
    satisfied: bool


def smallness_check(p: FluidParams, r0: float, theta: float) -> SmallnessReport:
    """Check the density-contrast smallness condition for an observed R0.

    R0 is the supremum of the velocity-gradient L2 norm seen in a run; the
    entropy bounds hold when |rho'| <= 4*pi / (C2 * R0^2) with
    C2 = 4/theta + log(2*theta).  Purely diagnostic.
    """
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    c2 = 4.0 / theta + np.log(2.0 * theta)
    thr = 4.0 * np.pi / (c2 * r0 * r0)
    rp = abs(0.5 * (p.rho1 - p.rho2))
    return SmallnessReport(rp, float(thr), float(c2), float(r0), rp <= thr)
