"""Transform plumbing, projectors, and norms."""

import numpy as np
import pytest

from insdecay.grid import Grid
from insdecay.spectral import (DensityField, SpectralField, VelocityField,
                               divergence, gradient, laplacian,
                               leray_complement, leray_project, lp_norm,
                               lp_norm_nodal, riesz, random_field,
                               random_solenoidal, sobolev_norm)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(7, 1.0)
    with pytest.raises(ValueError):
        Grid(4, 1.0)
    with pytest.raises(ValueError):
        Grid(64, -1.0)


def test_grid_wavenumbers(grid64):
    g = grid64
    assert g.k1[0] == 0.0
    assert np.isclose(g.k1[1], 2.0 * np.pi / g.l)
    # differentiation wavenumbers drop the unpaired Nyquist column
    assert g.kx_diff[g.n // 2, 0] == 0.0
    assert g.ky_diff[0, g.n // 2] == 0.0
    assert g.kmax == pytest.approx(np.sqrt(2.0) * (2.0 * np.pi / g.l) * g.n / 2)


def test_roundtrip(grid64, rng):
    nodal = rng.standard_normal((grid64.n, grid64.n))
    f = SpectralField.from_nodal(grid64, nodal)
    assert np.max(np.abs(f.to_nodal() - nodal)) < 1e-12
    assert f.hermitian_residual() < 1e-12


def test_mean_is_zero_mode(grid64):
    nodal = np.full((grid64.n, grid64.n), 3.25)
    f = SpectralField.from_nodal(grid64, nodal)
    assert f.coeffs[0, 0] == pytest.approx(3.25)
    assert np.sum(np.abs(f.coeffs)) == pytest.approx(3.25)


def test_parseval(grid64, rng):
    f = random_field(grid64, rng)
    n2 = lp_norm_nodal(f.to_nodal(), 2.0, grid64)
    spec = grid64.l * np.linalg.norm(f.coeffs)
    assert n2 == pytest.approx(spec, rel=1e-10)


def test_gradient_analytic(grid128):
    # d/dx sin(3x)cos(5y) etc., exact for trig polynomials
    g = grid128
    x, y = g.xy
    f = SpectralField.from_nodal(g, np.sin(3 * x) * np.cos(5 * y))
    fx, fy = gradient(f)
    assert np.max(np.abs(fx.to_nodal() - 3 * np.cos(3 * x) * np.cos(5 * y))) < 1e-10
    assert np.max(np.abs(fy.to_nodal() + 5 * np.sin(3 * x) * np.sin(5 * y))) < 1e-10
    lap = laplacian(f)
    assert np.max(np.abs(lap.to_nodal() + 34 * f.to_nodal())) < 1e-9


def test_gradient_fd_oracle():
    # independent check: 4th-order centered differences on a band-limited
    # field; agreement is limited by the FD truncation error only
    g = Grid(256, 2.0 * np.pi)
    x, y = g.xy
    nodal = (np.sin(2 * x + 1.0) * np.cos(3 * y)
             + 0.5 * np.cos(5 * x) * np.sin(4 * y - 0.7))
    f = SpectralField.from_nodal(g, nodal)
    fx, _ = gradient(f)
    h = g.dx
    # 6th-order centered stencil along axis 0 (the x axis in this layout)
    fd = (-np.roll(nodal, 3, 0) + 9 * np.roll(nodal, 2, 0)
          - 45 * np.roll(nodal, 1, 0) + 45 * np.roll(nodal, -1, 0)
          - 9 * np.roll(nodal, -2, 0) + np.roll(nodal, -3, 0)) / (60 * h)
    rel = np.max(np.abs(fx.to_nodal() - fd)) / np.max(np.abs(fd))
    assert rel < 1e-6


def test_divergence_of_gradient(grid64, rng):
    f = random_field(grid64, rng)
    fx, fy = gradient(f)
    lap = laplacian(f)
    div = divergence(fx, fy)
    assert np.max(np.abs(div.coeffs - lap.coeffs)) < 1e-10


def test_leray_idempotent_and_complement(grid64, rng):
    v1, v2 = random_field(grid64, rng), random_field(grid64, rng)
    u = leray_project(v1, v2)
    w1, w2 = leray_complement(v1, v2)
    assert u.divergence_residual() < 1e-12
    # P + Q = I
    assert np.max(np.abs(u.u1.coeffs + w1.coeffs - v1.coeffs)) < 1e-12
    assert np.max(np.abs(u.u2.coeffs + w2.coeffs - v2.coeffs)) < 1e-12
    # P^2 = P
    again = leray_project(u.u1, u.u2)
    assert np.max(np.abs(again.u1.coeffs - u.u1.coeffs)) < 1e-13
    # P of a gradient vanishes
    gx, gy = gradient(random_field(grid64, rng))
    pg = leray_project(gx, gy)
    assert np.max(np.abs(pg.u1.coeffs)) < 1e-12
    assert np.max(np.abs(pg.u2.coeffs)) < 1e-12


def test_riesz_identity(grid128, rng):
    f = random_field(grid128, rng)  # mean-free
    total = np.zeros_like(f.coeffs)
    for axis in (0, 1):
        total += riesz(riesz(f, axis), axis).coeffs
    assert np.max(np.abs(total + f.coeffs)) < 1e-12
    r12 = riesz(riesz(f, 0), 1).coeffs
    r21 = riesz(riesz(f, 1), 0).coeffs
    assert np.max(np.abs(r12 - r21)) < 1e-14


def test_lp_norms(grid64, rng):
    f = random_field(grid64, rng)
    nodal = f.to_nodal()
    assert lp_norm(f, np.inf) == pytest.approx(np.max(np.abs(nodal)))
    n1 = lp_norm(f, 1.0)
    assert n1 == pytest.approx(np.sum(np.abs(nodal)) * grid64.cell_area)
    assert lp_norm(f * 2.0, 1.5) == pytest.approx(2.0 * lp_norm(f, 1.5), rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_sobolev_norm(grid64, rng):
    f = random_field(grid64, rng)
    fx, fy = gradient(f)
    h1_sq = (lp_norm(f, 2.0) ** 2 + lp_norm(fx, 2.0) ** 2 + lp_norm(fy, 2.0) ** 2)
    assert sobolev_norm(f, 1.0) ** 2 == pytest.approx(h1_sq, rel=1e-10)
    assert sobolev_norm(f, 0.0) == pytest.approx(lp_norm(f, 2.0), rel=1e-12)


def test_velocity_checks(grid64, rng):
    u = random_solenoidal(grid64, rng)
    assert u.divergence_residual() < 1e-12
    v1, v2 = random_field(grid64, rng), random_field(grid64, rng)
    with pytest.raises(ValueError):
        VelocityField(v1, v2)  # not solenoidal, not marked trusted


def test_density_positivity(grid64):
    vals = np.full((grid64.n, grid64.n), 0.5)
    rho = DensityField(grid64, vals)
    assert rho.bounds() == (0.5, 0.5)
    with pytest.raises(ValueError):
        DensityField(grid64, vals - 1.0)
    DensityField(grid64, vals - 1.0, require_positive=False)  # opt-out works


def test_dealias_mask_symmetric(grid64):
    m = grid64.dealias_mask
    assert m[0, 0]
    # the mask respects Hermitian symmetry: m[k] == m[-k]
    flipped = m[np.ix_([0] + list(range(grid64.n - 1, 0, -1)),
                       [0] + list(range(grid64.n - 1, 0, -1)))]
    assert np.array_equal(m, flipped)
