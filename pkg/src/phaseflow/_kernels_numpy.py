"""Reference numpy implementations of the hot pointwise kernels.

Every function here has an ``@njit`` twin in ``_kernels_numba`` with the same
signature and (up to rounding) the same result.  Array arguments are 2D
float64 grids; scalars are plain floats.
"""

from __future__ import annotations

import numpy as np


def convex_prime(s, theta):
    """First derivative of the convex (logarithmic) part of the potential."""
    return 0.5 * theta * np.log((1.0 + s) / (1.0 - s))


def convex_second(s, theta):
    """Second derivative theta / (1 - s^2) of the convex part."""
    return theta / (1.0 - s * s)


def reg_prime(s, theta, eps):
    """First derivative of the C^2 Taylor-extended convex part."""
    hi = 1.0 - eps
    sc = np.clip(s, -hi, hi)
    core = 0.5 * theta * np.log((1.0 + sc) / (1.0 - sc))
    return core + theta / (1.0 - hi * hi) * (s - sc)


def reg_second(s, theta, eps):
    """Second derivative of the Taylor-extended convex part (clamped)."""
    hi = 1.0 - eps
    sc = np.clip(s, -hi, hi)
    return theta / (1.0 - sc * sc)


def newton_residual(phi, lap_phi, b, a, xi, fprime):
    """Residual phi + a*(-lap(phi) + F'(phi) - xi) - b of the implicit step."""
    return phi + a * (fprime - lap_phi - xi) - b


def max_interior_step(phi, dphi, lo, hi):
    """Largest step alpha with phi + alpha*dphi inside (lo, hi) everywhere.

    Returns a value > 1 when the full step stays interior.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(dphi > 0.0, (hi - phi) / dphi, np.inf)
        dn = np.where(dphi < 0.0, (lo - phi) / dphi, np.inf)
    return float(min(up.min(), dn.min()))


def interp_clamped(s, at_plus_one, at_minus_one):
    """Linear interpolation between endpoint values, s clamped to [-1, 1]."""
    sc = np.clip(s, -1.0, 1.0)
    return at_plus_one * (0.5 * (1.0 + sc)) + at_minus_one * (0.5 * (1.0 - sc))


def entropy_sums(phi, theta):
    """Grid sums of F'', (F'')^2*log(1+F''), and F'''*F' in one sweep."""
    om = 1.0 - phi * phi
    f2 = theta / om
    f3 = 2.0 * theta * phi / (om * om)
    f1 = 0.5 * theta * np.log((1.0 + phi) / (1.0 - phi))
    s1 = float(f2.sum())
    s2 = float((f2 * f2 * np.log1p(f2)).sum())
    s3 = float((f3 * f1).sum())
    return s1, s2, s3


def kinetic_sum(ux, uy, rho):
    """Grid sum of 0.5 * rho * |u|^2."""
    return float((0.5 * rho * (ux * ux + uy * uy)).sum())


def gradsq_sum(gx, gy):
    """Grid sum of |g|^2 for a vector sample (gx, gy)."""
    return float((gx * gx + gy * gy).sum())


def _xlogx(v):
    # continuous extension v*log(v) -> 0 at v = 0
    out = np.zeros_like(v)
    m = v > 0.0
    out[m] = v[m] * np.log(v[m])
    return out


def psi_sum(phi, theta, theta0):
    """Grid sum of the full mixing potential (log part minus quadratic).

    Requires |phi| <= 1; the entropy term is extended by continuity at +-1.
    """
    ent = _xlogx(1.0 + phi) + _xlogx(1.0 - phi)
    return float((0.5 * theta * ent - 0.5 * theta0 * phi * phi).sum())


def psi_reg_sum(phi, theta, theta0, eps):
    """Grid sum of the regularized mixing potential."""
    hi = 1.0 - eps
    sc = np.clip(phi, -hi, hi)
    f = 0.5 * theta * ((1.0 + sc) * np.log1p(sc) + (1.0 - sc) * np.log1p(-sc))
    d = phi - sc
    f1 = 0.5 * theta * np.log((1.0 + sc) / (1.0 - sc))
    f2 = theta / (1.0 - sc * sc)
    return float((f + f1 * d + 0.5 * f2 * d * d - 0.5 * theta0 * phi * phi).sum())


def abs_max_vec(ax, ay):
    """Max of sqrt(ax^2 + ay^2) over the grid."""
    return float(np.sqrt(ax * ax + ay * ay).max())
