"""Periodic 2D grid, spectral transforms, differential operators, projection.

Fields live on a uniform ``nx x ny`` sampling of the torus ``[0, lx) x
[0, ly)``; the first array axis is x.  Differentiation, the inverse
Laplacian, and the solenoidal (Leray) projection act mode-by-mode in Fourier
space and are exact on retained modes.

Transform normalization: the forward transform divides by ``nx*ny`` so a
coefficient is the amplitude of its mode (the constant field has coefficient
1 at k = 0), and the grid mean of ``f**2`` equals the sum of the squared
coefficient magnitudes (Parseval).

The internal fast path (used by the time steppers) works on half-complex
``rfft2`` spectra; the public :class:`Spectrum` carries the full complex
spectrum for clarity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "ScalarField",
    "Spectrum",
    "VectorField",
    "transform",
    "inverse_transform",
    "gradient",
    "divergence",
    "laplacian",
    "inv_laplacian_zero_mean",
    "leray_project",
    "dealias",
]

_MEAN_TOL = 1e-12


class GridError(ValueError):
    """Dimension or precondition violation in a grid operation."""


class Grid:
    """Uniform periodic grid with precomputed spectral machinery.

    Parameters
    ----------
    nx, ny : int
        Samples per axis; even and at least 8.
    lx, ly : float
        Domain lengths (default ``2*pi``).
    dealias_fraction : float
        Modes with ``|index| > dealias_fraction * n/2`` on either axis are
        zeroed by :meth:`dealias_hat`; default is the 2/3 rule.
    """

    def __init__(self, nx: int, ny: int, lx: float = 2.0 * np.pi,
                 ly: float = 2.0 * np.pi, dealias_fraction: float = 2.0 / 3.0):
        if nx < 8 or ny < 8 or nx % 2 or ny % 2:
            raise GridError("grid sizes must be even and at least 8")
        if lx <= 0 or ly <= 0:
            raise GridError("domain lengths must be positive")
        if not 0.0 < dealias_fraction <= 1.0:
            raise GridError("dealias_fraction must lie in (0, 1]")
        self.nx = int(nx)
        self.ny = int(ny)
        self.lx = float(lx)
        self.ly = float(ly)
        self.dealias_fraction = float(dealias_fraction)

        self.dx = self.lx / self.nx
        self.dy = self.ly / self.ny
        self.cell_area = self.dx * self.dy
        self.area = self.lx * self.ly

        x1 = np.arange(self.nx) * self.dx
        y1 = np.arange(self.ny) * self.dy
        self.x, self.y = np.meshgrid(x1, y1, indexing="ij")

        # Integer mode indices, full layout.  First derivatives of a real
        # field are ill-defined on the Nyquist mode (its phase is not
        # representable), so the differentiation wavenumbers zero it; using
        # them consistently makes div(grad) = lap exact on all modes and the
        # projection exactly solenoidal.  The 2/3 dealias cutoff removes the
        # Nyquist mode anyway.
        ix = np.fft.fftfreq(self.nx, 1.0 / self.nx)
        iy = np.fft.fftfreq(self.ny, 1.0 / self.ny)
        ix_d = ix.copy()
        ix_d[self.nx // 2] = 0.0
        iy_d = iy.copy()
        iy_d[self.ny // 2] = 0.0
        self.kx_full = (2.0 * np.pi / self.lx) * ix_d[:, None]
        self.ky_full = (2.0 * np.pi / self.ly) * iy_d[None, :]
        self.k2_full = self.kx_full**2 + self.ky_full**2
        cut_x = self.dealias_fraction * (self.nx / 2.0)
        cut_y = self.dealias_fraction * (self.ny / 2.0)
        self.mask_full = (np.abs(ix)[:, None] <= cut_x) & (np.abs(iy)[None, :] <= cut_y)

        # half-complex (rfft2) layout: full x axis, ky >= 0
        iyr = np.arange(self.ny // 2 + 1)
        iyr_d = iyr.astype(float)
        iyr_d[-1] = 0.0
        self.kx = self.kx_full
        self.ky = (2.0 * np.pi / self.ly) * iyr_d[None, :]
        self.k2 = self.kx**2 + self.ky**2
        # true squared wavenumbers (Nyquist included), for spectral norms
        self.k2_norm = ((2.0 * np.pi / self.lx) * ix[:, None]) ** 2 \
            + ((2.0 * np.pi / self.ly) * iyr[None, :]) ** 2
        self.mask = (np.abs(ix)[:, None] <= cut_x) & (iyr[None, :] <= cut_y)
        with np.errstate(divide="ignore"):
            inv = np.where(self.k2 > 0.0, 1.0 / np.where(self.k2 > 0.0, self.k2, 1.0), 0.0)
        self.inv_k2 = inv

        # Parseval weights for the half-complex layout: interior ky columns
        # represent a conjugate pair of full-spectrum modes.
        w = np.full(self.ny // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        self.hat_weight = w[None, :]

    # -- half-complex fast path -------------------------------------------

    def to_hat(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfft2(values)

    def from_hat(self, hat: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(hat, s=(self.nx, self.ny))

    def dx_hat(self, hat: np.ndarray) -> np.ndarray:
        return 1j * self.kx * hat

    def dy_hat(self, hat: np.ndarray) -> np.ndarray:
        return 1j * self.ky * hat

    def lap_hat(self, hat: np.ndarray) -> np.ndarray:
        return -self.k2 * hat

    def dealias_hat(self, hat: np.ndarray) -> np.ndarray:
        return hat * self.mask

    def lap(self, values: np.ndarray) -> np.ndarray:
        return self.from_hat(self.lap_hat(self.to_hat(values)))

    def grad(self, values: np.ndarray, masked: bool = False):
        hat = self.to_hat(values)
        if masked:
            hat = hat * self.mask
        return self.from_hat(self.dx_hat(hat)), self.from_hat(self.dy_hat(hat))

    def div(self, vx: np.ndarray, vy: np.ndarray) -> np.ndarray:
        hat = self.dx_hat(self.to_hat(vx)) + self.dy_hat(self.to_hat(vy))
        return self.from_hat(hat)

    def inv_lap_zero_mean_hat(self, hat: np.ndarray) -> np.ndarray:
        out = -hat * self.inv_k2
        out[0, 0] = 0.0
        return out

    def leray_hat(self, hx: np.ndarray, hy: np.ndarray):
        kdotv = self.kx * hx + self.ky * hy
        px = hx - self.kx * kdotv * self.inv_k2
        py = hy - self.ky * kdotv * self.inv_k2
        return px, py

    def dealias_values(self, values: np.ndarray) -> np.ndarray:
        return self.from_hat(self.to_hat(values) * self.mask)

    # -- quadrature ---------------------------------------------------------

    def mean(self, values: np.ndarray) -> float:
        return float(values.mean())

    def integrate(self, values: np.ndarray) -> float:
        return float(values.sum()) * self.cell_area

    # -- misc ----------------------------------------------------------------

    def same_as(self, other: "Grid") -> bool:
        return (self.nx, self.ny, self.lx, self.ly) == (other.nx, other.ny, other.lx, other.ly)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Grid({self.nx}x{self.ny}, lx={self.lx:g}, ly={self.ly:g})"


def _check_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.nx, grid.ny):
        raise GridError(f"field shape {values.shape} does not match grid "
                        f"({grid.nx}, {grid.ny})")
    if not np.all(np.isfinite(values)):
        raise GridError("field contains non-finite samples")
    return values


@dataclass
class ScalarField:
    """Real scalar samples on a grid (x-index first)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass
class VectorField:
    """Real vector samples on a grid."""

    grid: Grid
    x_values: np.ndarray
    y_values: np.ndarray

    def __post_init__(self):
        self.x_values = _check_values(self.grid, self.x_values)
        self.y_values = _check_values(self.grid, self.y_values)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.x_values.copy(), self.y_values.copy())


@dataclass
class Spectrum:
    """Full complex spectrum, amplitude-normalized (coefficient = mode amplitude)."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)


def transform(f: ScalarField) -> Spectrum:
    """Forward transform; the k = 0 coefficient equals the grid mean."""
    n = f.grid.nx * f.grid.ny
    return Spectrum(f.grid, np.fft.fft2(f.values) / n)


def inverse_transform(spec: Spectrum) -> ScalarField:
    """Invert :func:`transform`; imaginary round-off is discarded."""
    n = spec.grid.nx * spec.grid.ny
    return ScalarField(spec.grid, np.real(np.fft.ifft2(spec.coeffs * n)))


def gradient(f: ScalarField) -> VectorField:
    gx, gy = f.grid.grad(f.values)
    return VectorField(f.grid, gx, gy)


def divergence(v: VectorField) -> ScalarField:
    return ScalarField(v.grid, v.grid.div(v.x_values, v.y_values))


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, f.grid.lap(f.values))


def inv_laplacian_zero_mean(f: ScalarField) -> ScalarField:
    """Solve ``lap(u) = f`` with ``mean(u) = 0``; requires mean-free input."""
    scale = float(np.max(np.abs(f.values))) or 1.0
    if abs(f.grid.mean(f.values)) > _MEAN_TOL * scale:
        raise GridError("inv_laplacian_zero_mean requires a mean-free field")
    hat = f.grid.to_hat(f.values)
    out = f.grid.inv_lap_zero_mean_hat(hat)
    return ScalarField(f.grid, f.grid.from_hat(out))


def leray_project(v: VectorField) -> VectorField:
    """Project onto divergence-free fields; mean (k = 0) modes pass through."""
    g = v.grid
    px, py = g.leray_hat(g.to_hat(v.x_values), g.to_hat(v.y_values))
    return VectorField(g, g.from_hat(px), g.from_hat(py))


def dealias(spec: Spectrum) -> Spectrum:
    """Zero modes beyond the dealias cutoff on either axis."""
    return Spectrum(spec.grid, spec.coeffs * spec.grid.mask_full)
