"""Independent oracles shared by the test modules.

Everything here deliberately avoids the library's own fast paths: products
are checked against zero-padded evaluation on a doubled grid, quadratures
against closed forms or refined grids, and time steppers against Richardson
extrapolation in dt.
"""

import numpy as np

from phaseflow.grid import Grid


def full_amplitude_spectrum(values: np.ndarray) -> np.ndarray:
    n = values.shape[0] * values.shape[1]
    return np.fft.fft2(values) / n


def padded_product_coeffs(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Exact spectral coefficients of a pointwise product.

    Evaluates both trigonometric polynomials on a doubled grid (where the
    product is alias-free) and transforms back; returns the amplitude
    coefficients on the doubled grid, indexable by integer mode.
    """
    nx, ny = fa.shape
    big = (2 * nx, 2 * ny)

    def upsample(v):
        spec = full_amplitude_spectrum(v)
        out = np.zeros(big, dtype=complex)
        for ix in range(-nx // 2, nx // 2):
            for iy in range(-ny // 2, ny // 2):
                out[ix, iy] = spec[ix, iy]
        return np.real(np.fft.ifft2(out * big[0] * big[1]))

    prod = upsample(fa) * upsample(fb)
    return full_amplitude_spectrum(prod)


def band_limited(grid: Grid, rng, band: int, amplitude: float = 1.0) -> np.ndarray:
    """Random real field supported on |k_index| <= band (both axes)."""
    spec = np.zeros((grid.nx, grid.ny), dtype=complex)
    for ix in range(-band, band + 1):
        for iy in range(-band, band + 1):
            if ix == 0 and iy == 0:
                continue
            c = rng.standard_normal() + 1j * rng.standard_normal()
            spec[ix, iy] += c
            spec[-ix, -iy] += np.conj(c)
    vals = np.real(np.fft.ifft2(spec))
    peak = np.abs(vals).max() or 1.0
    return amplitude * vals / peak


def divergence_free_field(grid: Grid, rng, band: int, amplitude: float = 1.0):
    """Random solenoidal velocity sample via a streamfunction."""
    psi = band_limited(grid, rng, band, 1.0)
    hat = grid.to_hat(psi)
    ux = grid.from_hat(grid.dy_hat(hat))
    uy = -grid.from_hat(grid.dx_hat(hat))
    peak = np.sqrt(ux**2 + uy**2).max() or 1.0
    return amplitude * ux / peak, amplitude * uy / peak


def central_diff(f, s: float, h: float, order: int = 1) -> float:
    """Second-order centered finite differences up to third derivatives."""
    if order == 1:
        return (f(s + h) - f(s - h)) / (2 * h)
    if order == 2:
        return (f(s + h) - 2 * f(s) + f(s - h)) / h**2
    if order == 3:
        return (f(s + 2 * h) - 2 * f(s + h) + 2 * f(s - h) - f(s - 2 * h)) / (2 * h**3)
    raise ValueError(order)
