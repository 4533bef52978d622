"""Numba twins of the hot pointwise kernels.

Single-pass fused loops; no fastmath so both backends stay reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def convex_prime(s, theta):
    out = np.empty_like(s)
    h = 0.5 * theta
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            v = s[i, j]
            out[i, j] = h * np.log((1.0 + v) / (1.0 - v))
    return out


@njit(cache=True)
def convex_second(s, theta):
    out = np.empty_like(s)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            v = s[i, j]
            out[i, j] = theta / (1.0 - v * v)
    return out


@njit(cache=True)
def reg_prime(s, theta, eps):
    out = np.empty_like(s)
    hi = 1.0 - eps
    slope = theta / (1.0 - hi * hi)
    h = 0.5 * theta
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            v = s[i, j]
            vc = min(max(v, -hi), hi)
            out[i, j] = h * np.log((1.0 + vc) / (1.0 - vc)) + slope * (v - vc)
    return out


@njit(cache=True)
def reg_second(s, theta, eps):
    out = np.empty_like(s)
    hi = 1.0 - eps
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            v = s[i, j]
            vc = min(max(v, -hi), hi)
            out[i, j] = theta / (1.0 - vc * vc)
    return out


@njit(cache=True)
def newton_residual(phi, lap_phi, b, a, xi, fprime):
    out = np.empty_like(phi)
    for i in range(phi.shape[0]):
        for j in range(phi.shape[1]):
            out[i, j] = phi[i, j] + a * (fprime[i, j] - lap_phi[i, j] - xi) - b[i, j]
    return out


@njit(cache=True)
def max_interior_step(phi, dphi, lo, hi):
    alpha = np.inf
    for i in range(phi.shape[0]):
        for j in range(phi.shape[1]):
            p = phi[i, j]
            d = dphi[i, j]
            if d > 0.0:
                m = (hi - p) / d
                if m < alpha:
                    alpha = m
            elif d < 0.0:
                m = (lo - p) / d
                if m < alpha:
                    alpha = m
    return alpha


@njit(cache=True)
def interp_clamped(s, at_plus_one, at_minus_one):
    out = np.empty_like(s)
    for i in range(s.shape[0]):
        for j in range(s.shape[1]):
            v = min(max(s[i, j], -1.0), 1.0)
            out[i, j] = at_plus_one * (0.5 * (1.0 + v)) + at_minus_one * (0.5 * (1.0 - v))
    return out


@njit(cache=True)
def entropy_sums(phi, theta):
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    h = 0.5 * theta
    for i in range(phi.shape[0]):
        for j in range(phi.shape[1]):
            v = phi[i, j]
            om = 1.0 - v * v
            f2 = theta / om
            f3 = 2.0 * theta * v / (om * om)
            f1 = h * np.log((1.0 + v) / (1.0 - v))
            s1 += f2
            s2 += f2 * f2 * np.log1p(f2)
            s3 += f3 * f1
    return s1, s2, s3


@njit(cache=True)
def kinetic_sum(ux, uy, rho):
    s = 0.0
    for i in range(ux.shape[0]):
        for j in range(ux.shape[1]):
            s += 0.5 * rho[i, j] * (ux[i, j] * ux[i, j] + uy[i, j] * uy[i, j])
    return s


@njit(cache=True)
def gradsq_sum(gx, gy):
    s = 0.0
    for i in range(gx.shape[0]):
        for j in range(gx.shape[1]):
            s += gx[i, j] * gx[i, j] + gy[i, j] * gy[i, j]
    return s


@njit(cache=True)
def psi_sum(phi, theta, theta0):
    s = 0.0
    for i in range(phi.shape[0]):
        for j in range(phi.shape[1]):
            v = phi[i, j]
            vp = 1.0 + v
            vm = 1.0 - v
            ent = 0.0
            if vp > 0.0:
                ent += vp * np.log(vp)
            if vm > 0.0:
                ent += vm * np.log(vm)
            s += 0.5 * theta * ent - 0.5 * theta0 * v * v
    return s


@njit(cache=True)
def psi_reg_sum(phi, theta, theta0, eps):
    s = 0.0
    hi = 1.0 - eps
    h = 0.5 * theta
    for i in range(phi.shape[0]):
        for j in range(phi.shape[1]):
            v = phi[i, j]
            vc = min(max(v, -hi), hi)
            f = h * ((1.0 + vc) * np.log1p(vc) + (1.0 - vc) * np.log1p(-vc))
            d = v - vc
            f1 = h * np.log((1.0 + vc) / (1.0 - vc))
            f2 = theta / (1.0 - vc * vc)
            s += f + f1 * d + 0.5 * f2 * d * d - 0.5 * theta0 * v * v
    return s


@njit(cache=True)
def abs_max_vec(ax, ay):
    m = 0.0
    for i in range(ax.shape[0]):
        for j in range(ax.shape[1]):
            v = ax[i, j] * ax[i, j] + ay[i, j] * ay[i, j]
            if v > m:
                m = v
    return np.sqrt(m)
