import numpy as np
import pytest

from phaseflow.grid import (Grid, GridError, ScalarField, VectorField, dealias,
                            divergence, gradient, inv_laplacian_zero_mean,
                            laplacian, leray_project, transform,
                            inverse_transform)

from oracles import band_limited, padded_product_coeffs


@pytest.fixture
def grid():
    return Grid(32, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid(6, 32)
    with pytest.raises(GridError):
        Grid(33, 32)
    with pytest.raises(GridError):
        Grid(32, 32, lx=-1.0)
    with pytest.raises(GridError):
        Grid(32, 32, dealias_fraction=0.0)


def test_field_shape_and_finiteness(grid):
    with pytest.raises(GridError):
        ScalarField(grid, np.zeros((16, 32)))
    bad = np.zeros((32, 32))
    bad[0, 0] = np.inf
    with pytest.raises(GridError):
        ScalarField(grid, bad)


def test_constant_field_spectrum(grid):
    spec = transform(ScalarField(grid, np.ones((32, 32))))
    assert spec.coeffs[0, 0] == pytest.approx(1.0, abs=1e-15)
    rest = np.abs(spec.coeffs).sum() - abs(spec.coeffs[0, 0])
    assert rest <= 1e-13


def test_cosine_two_modes(grid):
    spec = transform(ScalarField(grid, np.cos(grid.x)))
    assert spec.coeffs[1, 0] == pytest.approx(0.5, abs=1e-14)
    assert spec.coeffs[-1, 0] == pytest.approx(0.5, abs=1e-14)
    mask = np.ones_like(spec.coeffs, dtype=bool)
    mask[1, 0] = mask[-1, 0] = False
    assert np.abs(spec.coeffs[mask]).max() <= 1e-14


def test_round_trip(grid, rng):
    f = ScalarField(grid, rng.standard_normal((32, 32)))
    back = inverse_transform(transform(f))
    scale = np.abs(f.values).max()
    assert np.abs(back.values - f.values).max() <= 1e-12 * scale


def test_conjugate_symmetry(grid, rng):
    spec = transform(ScalarField(grid, rng.standard_normal((32, 32)))).coeffs
    for ix in range(-15, 16):
        for iy in range(-15, 16):
            assert spec[ix, iy] == pytest.approx(np.conj(spec[-ix, -iy]), abs=1e-13)


def test_laplacian_eigenfunction(grid):
    f = ScalarField(grid, np.cos(grid.x))
    lap = laplacian(f)
    assert np.abs(lap.values + f.values).max() <= 1e-12


def test_divergence_of_gradient_is_laplacian(grid, rng):
    f = ScalarField(grid, band_limited(grid, rng, band=9))
    got = divergence(gradient(f))
    want = laplacian(f)
    assert np.abs(got.values - want.values).max() <= 1e-12 * max(1.0, np.abs(want.values).max())


def test_inverse_laplacian(grid, rng):
    f = ScalarField(grid, band_limited(grid, rng, band=9))
    recovered = inv_laplacian_zero_mean(laplacian(f))
    target = f.values - f.values.mean()
    assert np.abs(recovered.values - target).max() <= 1e-10


def test_inverse_laplacian_rejects_nonzero_mean(grid):
    with pytest.raises(GridError):
        inv_laplacian_zero_mean(ScalarField(grid, np.ones((32, 32))))


def test_leray_annihilates_gradients(grid, rng):
    p = band_limited(grid, rng, band=9)
    gp = gradient(ScalarField(grid, p - p.mean()))
    out = leray_project(gp)
    assert np.abs(out.x_values).max() <= 1e-12
    assert np.abs(out.y_values).max() <= 1e-12


def test_leray_divergence_free_and_idempotent(grid, rng):
    v = VectorField(grid, rng.standard_normal((32, 32)), rng.standard_normal((32, 32)))
    pv = leray_project(v)
    assert np.abs(divergence(pv).values).max() <= 1e-12 * max(1.0, np.abs(pv.x_values).max())
    ppv = leray_project(pv)
    assert np.abs(ppv.x_values - pv.x_values).max() <= 1e-13
    assert np.abs(ppv.y_values - pv.y_values).max() <= 1e-13


def test_leray_fixes_divergence_free_input(grid, rng):
    psi = band_limited(grid, rng, band=9)
    hat = grid.to_hat(psi)
    v = VectorField(grid, grid.from_hat(grid.dy_hat(hat)),
                    -grid.from_hat(grid.dx_hat(hat)))
    pv = leray_project(v)
    assert np.abs(pv.x_values - v.x_values).max() <= 1e-12
    assert np.abs(pv.y_values - v.y_values).max() <= 1e-12


def test_leray_keeps_mean_modes(grid):
    v = VectorField(grid, np.full((32, 32), 0.7), np.full((32, 32), -0.2))
    pv = leray_project(v)
    assert pv.x_values == pytest.approx(0.7, abs=1e-14)
    assert pv.y_values == pytest.approx(-0.2, abs=1e-14)


def test_dealias_constant_unchanged(grid):
    spec = transform(ScalarField(grid, np.full((32, 32), 2.5)))
    out = dealias(spec)
    assert np.abs(out.coeffs - spec.coeffs).max() == 0.0


def test_dealias_removes_top_mode():
    g16 = Grid(16, 16)
    f = ScalarField(g16, np.cos(8 * g16.x))  # Nyquist mode, index 8
    out = dealias(transform(f))
    assert np.abs(out.coeffs).max() == 0.0


def test_dealias_matches_padded_product(grid, rng):
    fa = band_limited(grid, rng, band=10)
    fb = band_limited(grid, rng, band=10)
    spec = dealias(transform(ScalarField(grid, fa * fb)))
    exact = padded_product_coeffs(fa, fb)
    cut = grid.dealias_fraction * grid.nx / 2.0
    for ix in range(-int(cut), int(cut) + 1):
        for iy in range(-int(cut), int(cut) + 1):
            assert spec.coeffs[ix, iy] == pytest.approx(exact[ix, iy], abs=1e-12)


def test_parseval(grid, rng):
    f = ScalarField(grid, rng.standard_normal((32, 32)))
    mean_sq = float((f.values**2).mean())
    coeff_sq = float((np.abs(transform(f).coeffs) ** 2).sum())
    assert coeff_sq == pytest.approx(mean_sq, rel=1e-12)


def test_gradient_divergence_adjoint(grid, rng):
    f = grid.dealias_values(rng.standard_normal((32, 32)))
    vx = grid.dealias_values(rng.standard_normal((32, 32)))
    vy = grid.dealias_values(rng.standard_normal((32, 32)))
    lhs = grid.integrate(f * grid.div(vx, vy))
    gx, gy = grid.grad(f)
    rhs = -grid.integrate(gx * vx + gy * vy)
    assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(rhs)))
