"""Logarithmic mixing potential, its convex core, and entropy functionals.

The free-energy density is

    psi(s) = (theta/2) * [(1+s)*log(1+s) + (1-s)*log(1-s)] - (theta0/2) * s**2

on [-1, 1] (entropy term extended by continuity at the endpoints, i.e.
0*log 0 := 0).  Its convex part

    f(s) = (theta/2) * [(1+s)*log(1+s) + (1-s)*log(1-s)]

carries the singularity at +-1; derivatives up to fourth order are available
in closed form.  A C^2 family ``f_eps`` replaces ``f`` outside
``[-1+eps, 1-eps]`` by the second-order Taylor polynomial about the matching
point, giving a globally defined potential used by the regularized solver
mode.

Derivative evaluations reject arguments within ``1e-15`` of the endpoints
instead of returning infinities: silent NaN propagation is the dominant
failure mode of codes built on this potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import ScalarField

__all__ = [
    "PotentialParams",
    "SingularArgumentError",
    "psi",
    "psi_prime",
    "f_value",
    "f1",
    "f2",
    "f3",
    "f4",
    "f_eps",
    "f_eps_d1",
    "f_eps_d2",
    "entropy_integrals",
    "alpha_unit_slope",
    "log_product_constants",
    "second_derivative_constants",
]

_GUARD = 1.0 - 1e-15


class SingularArgumentError(ValueError):
    """Argument at or beyond the potential's singular endpoints."""


@dataclass(frozen=True)
class PotentialParams:
    """Temperature scales of the mixing potential and regularization width.

    ``0 < theta < theta0`` is required (the demixing regime); ``epsilon``
    only enters the regularized family and must lie in (0, 1/2).
    """

    theta: float = 1.0
    theta0: float = 2.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.theta < self.theta0:
            raise ValueError("need 0 < theta < theta0")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")


def _as_array(s):
    return np.asarray(s, dtype=float)


def _check_closed(s):
    s = _as_array(s)
    if np.any(np.abs(s) > 1.0):
        raise SingularArgumentError("argument outside [-1, 1]")
    return s


def _check_open(s):
    s = _as_array(s)
    if np.any(np.abs(s) >= _GUARD):
        raise SingularArgumentError("argument too close to the singular endpoints +-1")
    return s


def _xlogx(v):
    out = np.zeros_like(v)
    m = v > 0.0
    out[m] = v[m] * np.log(v[m])
    return out


def psi(s, p: PotentialParams):
    """Full potential on [-1, 1]; continuous extension at the endpoints."""
    s = _check_closed(s)
    val = 0.5 * p.theta * (_xlogx(1.0 + s) + _xlogx(1.0 - s)) - 0.5 * p.theta0 * s * s
    return val if val.ndim else float(val)


def psi_prime(s, p: PotentialParams):
    """psi'(s) = f1(s) - theta0 * s on the open interval."""
    s = _check_open(s)
    val = 0.5 * p.theta * np.log((1.0 + s) / (1.0 - s)) - p.theta0 * s
    return val if val.ndim else float(val)


def f_value(s, p: PotentialParams):
    """Convex part of the potential (defined on the closed interval)."""
    s = _check_closed(s)
    val = 0.5 * p.theta * (_xlogx(1.0 + s) + _xlogx(1.0 - s))
    return val if val.ndim else float(val)


def f1(s, p: PotentialParams):
    s = _check_open(s)
    val = 0.5 * p.theta * np.log((1.0 + s) / (1.0 - s))
    return val if val.ndim else float(val)


def f2(s, p: PotentialParams):
    s = _check_open(s)
    val = p.theta / (1.0 - s * s)
    return val if val.ndim else float(val)


def f3(s, p: PotentialParams):
    s = _check_open(s)
    om = 1.0 - s * s
    val = 2.0 * p.theta * s / (om * om)
    return val if val.ndim else float(val)


def f4(s, p: PotentialParams):
    s = _check_open(s)
    om = 1.0 - s * s
    val = 2.0 * p.theta * (1.0 + 3.0 * s * s) / (om * om * om)
    return val if val.ndim else float(val)


# -- regularized family ------------------------------------------------------


def _reg_pieces(s, p: PotentialParams):
    hi = 1.0 - p.epsilon
    sc = np.clip(s, -hi, hi)
    d = s - sc
    return sc, d, hi


def f_eps(s, p: PotentialParams):
    """C^2 extension: equals the convex part on [-1+eps, 1-eps], quadratic outside."""
    s = _as_array(s)
    sc, d, _ = _reg_pieces(s, p)
    base = 0.5 * p.theta * (_xlogx(1.0 + sc) + _xlogx(1.0 - sc))
    d1 = 0.5 * p.theta * np.log((1.0 + sc) / (1.0 - sc))
    d2 = p.theta / (1.0 - sc * sc)
    val = base + d1 * d + 0.5 * d2 * d * d
    return val if val.ndim else float(val)


def f_eps_d1(s, p: PotentialParams):
    s = _as_array(s)
    sc, d, _ = _reg_pieces(s, p)
    val = 0.5 * p.theta * np.log((1.0 + sc) / (1.0 - sc)) + p.theta / (1.0 - sc * sc) * d
    return val if val.ndim else float(val)


def f_eps_d2(s, p: PotentialParams):
    s = _as_array(s)
    sc, _, _ = _reg_pieces(s, p)
    val = p.theta / (1.0 - sc * sc)
    return val if val.ndim else float(val)


def psi_eps(s, p: PotentialParams):
    """Regularized full potential f_eps(s) - (theta0/2) s^2 (total function)."""
    s = _as_array(s)
    val = f_eps(s, p) - 0.5 * p.theta0 * s * s
    return val if np.ndim(val) else float(val)


def psi_eps_prime(s, p: PotentialParams):
    s = _as_array(s)
    val = f_eps_d1(s, p) - p.theta0 * s
    return val if np.ndim(val) else float(val)


# -- integral functionals ------------------------------------------------------


def entropy_integrals(phi: ScalarField, p: PotentialParams):
    """Quadrature of (f2, f2^2*log(1+f2), f3*f1) composed with the field.

    Returns the three integrals (grid sum times cell area).  Every sample
    must satisfy |phi| < 1.
    """
    vals = phi.values
    if float(np.max(np.abs(vals))) >= _GUARD:
        raise SingularArgumentError("entropy integrals need max|phi| < 1")
    s1, s2, s3 = backend.kernels.entropy_sums(vals, p.theta)
    ca = phi.grid.cell_area
    return s1 * ca, s2 * ca, s3 * ca


# -- constants used by the samplewise inequalities ----------------------------


def alpha_unit_slope(theta: float, tol: float = 1e-14) -> float:
    """The point alpha in (0, 1) where the convex part has slope one.

    Solved by bisection on f1(alpha) = 1 (monotone increasing).
    """
    lo, hi = 0.0, 1.0 - 1e-14
    p = PotentialParams(theta=theta, theta0=2.0 * theta)
    if f1(hi, p) < 1.0:
        raise ValueError("unit-slope point not bracketed for this theta")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f1(mid, p) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_product_constants(theta: float):
    """Constants (C1, C2) of |f3| log|f3| <= C1 + C2 * f3 * f1.

    C2 = 4/theta + log(2*theta) and C1 = log(2*theta) * f3(alpha) with
    f1(alpha) = 1.
    """
    c0 = math.log(2.0 * theta)
    alpha = alpha_unit_slope(theta)
    p = PotentialParams(theta=theta, theta0=2.0 * theta)
    return c0 * f3(alpha, p), 4.0 / theta + c0


def second_derivative_constants(theta: float):
    """Constants (C3, C4) of f2 <= C3 + C4 * f3 * f1: C3 = f2(1/2), C4 = 3/(4*f1(1/2))."""
    p = PotentialParams(theta=theta, theta0=2.0 * theta)
    return f2(0.5, p), 3.0 / (4.0 * f1(0.5, p))
