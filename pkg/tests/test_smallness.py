"""Explicit constants and the viscosity-perturbation admissibility gate."""

import math

import numpy as np
import pytest

from insdecay.grid import Grid
from insdecay.initial_data import (InitialDataSpec, gen_initial_density,
                                   gen_initial_velocity)
from insdecay.smallness import (DataNorms, check_smallness, compute_G,
                                compute_K, data_norms, g1_term_table,
                                g2_term_table, k_term_table)
from insdecay.spectral import (DensityField, SpectralField, VelocityField,
                               velocity_lp_norm, velocity_sobolev_norm)
from insdecay.viscosity import ViscosityLaw


def _zero_state(g):
    z = SpectralField(g, g.zeros_coeffs())
    u = VelocityField(z, z, trusted=True)
    rho = DensityField(g, np.ones((g.n, g.n)))
    return u, rho


def _small_state(g, contrast=0.2, seed=12):
    spec = InitialDataSpec(amplitude=1.0, k_c=1.0, target_p=1.5, seed=seed)
    u0, _ = gen_initial_velocity(spec, g)
    rho0 = gen_initial_density(g, contrast, k_band=3.0 * 2 * np.pi / g.l,
                               seed=seed + 1)
    return u0, rho0


def test_zero_data_zeroes_everything():
    g = Grid(32, 2 * np.pi)
    u, rho = _zero_state(g)
    n = data_norms(u, rho, 1.5)
    assert (n.lp, n.h1, n.l2, n.rho_l2) == (0.0, 0.0, 0.0, 0.0)
    assert compute_K(n) == 0.0
    assert compute_G(n) == (0.0, 0.0, 0.0)
    rep = check_smallness(u, rho, ViscosityLaw.affine(0.05, 0.3), eta=1.5)
    assert rep.lhs == 0.0
    assert rep.passed


def test_unit_norm_term_tables():
    # velocity norms 1, constant density: the surviving monomials count up
    # to K = 4e, G1 = 5, G2 = 4, G = 5 e^4
    n = DataNorms(lp=1.0, h1=1.0, l2=1.0, rho_l2=0.0)
    assert compute_K(n, C=1.0) == pytest.approx(4.0 * math.e, rel=1e-14)
    g1, g2, G = compute_G(n)
    assert g1 == 5.0
    assert g2 == 4.0
    assert G == pytest.approx(5.0 * math.exp(4.0), rel=1e-14)
    # with a unit density deviation every monomial is live
    full = DataNorms(1.0, 1.0, 1.0, 1.0)
    assert compute_K(full, C=1.0) == pytest.approx(6.0 * math.e, rel=1e-14)
    g1, g2, G = compute_G(full)
    assert (g1, g2) == (8.0, 6.0)
    assert G == pytest.approx(8.0 * math.exp(6.0), rel=1e-14)
    # the C knob only scales the exponential
    assert compute_K(n, C=2.0) == pytest.approx(4.0 * math.exp(2.0), rel=1e-14)
    assert len(k_term_table(full)) == 6
    assert len(g1_term_table(full)) == 8
    assert len(g2_term_table(full)) == 6


def test_data_norms_match_direct_evaluation():
    g = Grid(64, 50.0)
    u0, rho0 = _small_state(g)
    n = data_norms(u0, rho0, 1.5)
    assert n.lp == pytest.approx(velocity_lp_norm(u0, 1.5), rel=1e-14)
    assert n.l2 == pytest.approx(velocity_lp_norm(u0, 2.0), rel=1e-14)
    assert n.h1 == pytest.approx(velocity_sobolev_norm(u0, 1.0), rel=1e-14)
    dev = SpectralField.from_nodal(g, rho0.values - 1.0)
    from insdecay.spectral import lp_norm
    assert n.rho_l2 == pytest.approx(lp_norm(dev, 2.0), rel=1e-14)


def test_gate_passes_for_constant_viscosity():
    g = Grid(64, 50.0)
    u0, rho0 = _small_state(g)
    rep = check_smallness(u0, rho0, ViscosityLaw.affine(0.05, 0.0), eta=1.5)
    assert rep.besov_factor == 0.0
    assert rep.lhs == 0.0
    assert rep.passed
    assert rep.K > 0.0 and rep.G > 0.0  # data is not small, only the law is


def test_gate_flips_exactly_at_threshold_slope():
    # lhs is homogeneous of degree 1 in the affine slope, so the pass/fail
    # boundary sits at a computable slope.  The data must be genuinely small:
    # G enters at power eta+1, and a large G pushes the critical slope below
    # the resolution of mu0 + slope*(rho-1) in float64.
    g = Grid(64, 2 * np.pi)
    u0, _ = gen_initial_velocity(
        InitialDataSpec(amplitude=0.1, k_c=2.0, target_p=1.5, seed=12), g)
    rho0 = gen_initial_density(g, 0.05, k_band=3.0, seed=13)
    mu0, eta = 0.05, 1.5
    probe = check_smallness(u0, rho0, ViscosityLaw.affine(mu0, 1e-4), eta=eta)
    assert probe.lhs > 0.0
    slope_star = 1e-4 * probe.threshold / probe.lhs
    below = check_smallness(u0, rho0, ViscosityLaw.affine(mu0, 0.999 * slope_star), eta=eta)
    above = check_smallness(u0, rho0, ViscosityLaw.affine(mu0, 1.001 * slope_star), eta=eta)
    assert below.passed
    assert not above.passed
    assert above.lhs / below.lhs == pytest.approx(1.001 / 0.999, rel=1e-9)


def test_gate_monotone_in_slope():
    g = Grid(64, 50.0)
    u0, rho0 = _small_state(g)
    slopes = [1e-5, 1e-4, 1e-3, 1e-2]
    lhss = [check_smallness(u0, rho0, ViscosityLaw.affine(0.05, s), eta=1.5).lhs
            for s in slopes]
    assert all(a < b for a, b in zip(lhss, lhss[1:]))
    # and linear: tenfold slope, tenfold lhs
    assert lhss[1] / lhss[0] == pytest.approx(10.0, rel=1e-9)


def test_gate_guards_and_entries():
    g = Grid(32, 2 * np.pi)
    u0, rho0 = _small_state(g, contrast=0.1, seed=4)
    with pytest.raises(ValueError, match="eta"):
        check_smallness(u0, rho0, ViscosityLaw.affine(0.05, 0.01), eta=1.0)
    rep = check_smallness(u0, rho0, ViscosityLaw.affine(0.05, 0.01), eta=1.5,
                          C=2.0, C0=0.5, c0=0.02)
    entries = rep.as_entries()
    for key in ("K", "G1", "G2", "G", "besov_factor", "lhs", "threshold",
                "eta", "C", "C0", "c0", "mu0", "norm_lp", "norm_h1",
                "norm_l2", "norm_rho_l2", "passed"):
        assert key in entries
    assert entries["threshold"] == pytest.approx(0.02 * 0.05, rel=1e-14)
    assert entries["passed"] == (entries["lhs"] <= entries["threshold"])
