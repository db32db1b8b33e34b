"""Ladder integrals, fitted constants, and the Gronwall bound."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from insdecay.inequalities import (GAMMA2_M_GRID, GAMMA3_GRID, IntegralResult,
                                   calculus_integral, fit_gamma2,
                                   gronwall_bound, load_gamma_constants)

E = math.e


def test_case1_exact_value():
    res = calculus_integral(1, math.inf, m=2.0)
    # int_0^inf ds / ((s+e) ln^2(s+e)) = 1 exactly
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert res.bound == pytest.approx(1.0, abs=1e-15)
    assert res.satisfied
    # finite horizon: antiderivative is -1/ln(s+e)
    for t in (3.0, 100.0, 1e5):
        res = calculus_integral(1, t, m=2.0)
        assert res.value == pytest.approx(1.0 - 1.0 / math.log(t + E), rel=1e-10)
    res = calculus_integral(1, math.inf, m=3.0)
    assert res.value == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(ValueError):
        calculus_integral(1, math.inf, m=1.0)


def test_case2_incomplete_gamma_oracle():
    # after y = ln(s+e) the integral is int_1^inf y^m e^{-beta y} dy
    #   = beta^-(m+1) Gamma(m+1) Q(m+1, beta)
    for m in (0.0, 0.5, 1.0, 2.0, 3.0):
        for beta in (0.1, 0.7, 1.0, 2.5):
            res = calculus_integral(2, math.inf, m=m, beta=beta)
            oracle = (beta ** -(m + 1.0) * gamma_fn(m + 1.0)
                      * gammaincc(m + 1.0, beta))
            assert res.value == pytest.approx(oracle, rel=1e-10)


def test_case2_sweep_respects_frozen_constants():
    betas = np.geomspace(0.05, 4.0, 25)
    for m in GAMMA2_M_GRID:
        for beta in betas:
            res = calculus_integral(2, math.inf, m=m, beta=float(beta))
            assert res.satisfied, f"case 2 m={m} beta={beta}: " \
                                  f"{res.value} > {res.bound}"
    with pytest.raises(ValueError):
        calculus_integral(2, math.inf, m=1.0, beta=0.0)


def test_case3_sweep_respects_frozen_constants():
    for m, alpha in GAMMA3_GRID:
        for t in (5.0, 50.0, 5e3, 1e6):
            res = calculus_integral(3, t, m=m, alpha=alpha)
            assert res.satisfied, f"case 3 m={m} alpha={alpha} t={t}"
    with pytest.raises(ValueError):
        calculus_integral(3, math.inf, m=1.0)
    with pytest.raises(ValueError):
        calculus_integral(3, 10.0, m=1.0, alpha=1.0)
    with pytest.raises(ValueError):
        calculus_integral(3, 10.0, m=-0.5)


def test_frozen_gamma_table():
    table = load_gamma_constants()
    for m in GAMMA2_M_GRID:
        assert f"gamma2_m{m:g}" in table
    for m, alpha in GAMMA3_GRID:
        assert f"gamma3_m{m:g}_a{alpha:g}" in table
    # the two analytically known cells: int y^m e^{-by} over the sweep has
    # sup b^(m+1) I -> Gamma(m+1) as b -> 0, so gamma2_m2 ~ 2, gamma2_m3 ~ 6
    assert table["gamma2_m2"] == pytest.approx(2.0, rel=1e-4)
    assert table["gamma2_m3"] == pytest.approx(6.0, rel=1e-4)
    assert table["gamma3_m0_a0"] == pytest.approx(1.0, rel=1e-5)
    # regeneration lands on the frozen value
    assert fit_gamma2(2.0) == pytest.approx(table["gamma2_m2"], rel=1e-9)


def test_gronwall_constant_coefficients():
    # g = a, h = c gives bound a e^{ct}, reached exactly by y' = c y
    t = np.linspace(0.0, 2.0, 2001)
    a, c = 0.8, 1.3
    bound = gronwall_bound(t, np.full_like(t, a), np.full_like(t, c))
    assert np.max(np.abs(bound - a * np.exp(c * t)) / (a * np.exp(c * t))) < 2e-6


def test_gronwall_dominates_integral_equation():
    # y = g + int h y  <=>  y' = g' + h y, y(0) = g(0); solutions of the
    # equality case must stay below (and for constant g, exactly on) the bound
    rng = np.random.default_rng(515)
    t = np.linspace(0.0, 3.0, 1501)
    for trial in range(40):
        a0, a1, w = rng.uniform(0.5, 2.0, 3)
        b0, b1 = rng.uniform(0.1, 1.0, 2)
        g = a0 + a1 * np.sin(w * t) ** 2
        h = b0 + b1 * np.cos(0.7 * w * t) ** 2
        gdot = lambda s: 2 * a1 * np.sin(w * s) * np.cos(w * s) * w
        hval = lambda s: b0 + b1 * np.cos(0.7 * w * s) ** 2
        sol = solve_ivp(lambda s, y: gdot(s) + hval(s) * y, (0.0, 3.0),
                        [g[0]], t_eval=t, rtol=1e-10, atol=1e-12)
        bound = gronwall_bound(t, g, h)
        margin = bound - sol.y[0]
        assert np.min(margin) >= -1e-6 * np.max(bound)

    # scaled-down forcing must be strictly dominated
    g = np.full_like(t, 1.0)
    h = np.full_like(t, 0.9)
    sol = solve_ivp(lambda s, y: 0.9 * y, (0.0, 3.0), [0.6], t_eval=t,
                    rtol=1e-10, atol=1e-12)
    bound = gronwall_bound(t, g, h)
    assert np.min(bound - sol.y[0]) > 0.3


def test_gronwall_validation():
    t = np.linspace(0.0, 1.0, 50)
    ones = np.ones_like(t)
    with pytest.raises(ValueError):
        gronwall_bound(t, ones, -ones)
    with pytest.raises(ValueError):
        gronwall_bound(t, ones[:-1], ones)
    with pytest.raises(ValueError):
        gronwall_bound(t[::-1], ones, ones)


def test_integral_result_slack():
    assert IntegralResult(1.0, 1.0, 1, {}).satisfied
    assert IntegralResult(1.0 + 5e-10, 1.0, 1, {}).satisfied
    assert not IntegralResult(1.001, 1.0, 1, {}).satisfied
