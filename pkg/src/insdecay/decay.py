"""Decay-rate measurement harness.

The qualitative picture being verified: on the torus the spectrum is
discrete, so energies eventually decay exponentially at the rate of the
lowest surviving mode.  Algebraic decay laws are therefore meaningful only
up to the box-validity cutoff

    t* = l^2 / (8 pi^2 mu0),

the moment viscosity has resolved the largest scale the box can hold.
All fit windows must stay inside (0, t*); the defaults start after five
dissipation times of the profile cutoff k_c, when the transform has
settled onto its low-frequency plateau, and end at t*/2.

`fourier_splitting_check` evaluates the frequency-splitting differential
inequality at trajectory snapshots: with g^2 = numerator/((e+t) ln(e+t))
and the ball S(t) = {|xi| <= sqrt(M/2) g(t)},

    d/dt ||sqrt(rho) u||^2 + g^2 ||sqrt(rho) u||^2 <= M g^2 * E_S(t),

where E_S is the low-frequency part of the energy (L^2 normalization of
the coefficient sum, so both sides live on the same scale).  The time
derivative on the left is assembled from the spatial terms (u_t from the
momentum balance, rho_t from transport), never by differencing samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .solver import Trajectory, momentum_rhs, _ifft
from .spectral import VelocityField
from .viscosity import ViscosityLaw

__all__ = [
    "E",
    "beta_exponent",
    "box_validity_cutoff",
    "default_fit_window",
    "heat_baseline",
    "heat_trajectory",
    "FitResult",
    "fit_decay_exponent",
    "DecayReport",
    "fit_decay_report",
    "SplittingReport",
    "fourier_splitting_check",
    "splitting_threshold",
    "EnergyLedger",
    "energy_ledger",
    "WEIGHTS",
]

E = math.e


def beta_exponent(p: float) -> float:
    """beta(p) = (2/p - 1)/2; the L^2 energy decays like (t+e)^(-2 beta)."""
    if not 1.0 < p < 2.0:
        raise ValueError(f"p must lie in (1, 2), got {p}")
    return 0.5 * (2.0 / p - 1.0)


def box_validity_cutoff(l: float, mu0: float) -> float:
    return l**2 / (8.0 * np.pi**2 * mu0)


def default_fit_window(k_c: float, mu0: float, l: float) -> tuple[float, float]:
    t_lo = 5.0 / (mu0 * k_c**2)
    t_hi = 0.5 * box_validity_cutoff(l, mu0)
    if t_lo >= t_hi:
        raise ValueError(
            f"no box-valid fit window: 5 dissipation times of k_c is {t_lo:.3g} "
            f"but half the box cutoff is {t_hi:.3g}"
        )
    return t_lo, t_hi


# ----------------------------------------------------------------------
# heat flow
# ----------------------------------------------------------------------

def heat_baseline(u0: VelocityField, mu0: float, times) -> dict[str, np.ndarray]:
    """Exact spectral evaluation of the heat semigroup norms of u0."""
    g = u0.grid
    times = np.asarray(times, dtype=np.float64)
    e2 = np.abs(u0.u1.coeffs) ** 2 + np.abs(u0.u2.coeffs) ** 2
    damp = np.exp(-2.0 * mu0 * times[:, None] * g.k2.ravel()[None, :])
    base = e2.ravel()[None, :] * damp
    l2_u_sq = g.l**2 * np.sum(base, axis=1)
    l2_grad_sq = g.l**2 * np.sum(base * g.k2.ravel()[None, :], axis=1)
    return {"t": times, "l2_u_sq": l2_u_sq, "l2_grad_u_sq": l2_grad_sq}


def heat_trajectory(u0: VelocityField, mu0: float, times) -> Trajectory:
    """Snapshot trajectory of the linear heat flow with rho = 1.

    Used as the control case for the splitting inequality: the tendency is
    mu0 Lap u exactly, no nonlinearity, no pressure.
    """
    g = u0.grid
    times = list(np.asarray(times, dtype=np.float64))
    ones = np.ones((g.n, g.n))
    snaps = []
    for t in times:
        damp = np.exp(-mu0 * t * g.k2)
        snaps.append((u0.u1.coeffs * damp, u0.u2.coeffs * damp, ones.copy()))
    base = heat_baseline(u0, mu0, times)
    diag = {
        "t": np.asarray(times),
        "l2_u": np.sqrt(base["l2_u_sq"]),
        "l2_grad_u": np.sqrt(base["l2_grad_u_sq"]),
    }
    law = ViscosityLaw.affine(mu0, 0.0)
    return Trajectory(grid=g, law=law, dt=float("nan"), diagnostics=diag,
                      snapshot_times=times, snapshots=snaps,
                      meta={"kind": "heat", "mu0": mu0})


# ----------------------------------------------------------------------
# exponent fitting
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    exponent: float
    ci95: float
    stderr: float
    n_samples: int
    window: tuple[float, float]


def fit_decay_exponent(times, values, window: tuple[float, float] | None = None
                       ) -> FitResult:
    """Least-squares slope of log(value) against log(t + e).

    Returns the decay exponent (minus the slope) with a 1.96-sigma
    confidence halfwidth from the standard regression error.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if window is not None:
        keep = (times >= window[0]) & (times <= window[1])
        times, values = times[keep], values[keep]
    else:
        window = (float(times.min()), float(times.max()))
    if times.size < 10:
        raise ValueError(f"need at least 10 samples in the window, got {times.size}")
    if np.any(values <= 0.0):
        raise ValueError("values must be positive for a log-log fit")
    x = np.log(times + E)
    y = np.log(values)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    if sxx == 0.0:
        raise ValueError("degenerate fit window (all samples at one time)")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    resid = y - (y.mean() + slope * (x - xbar))
    dof = max(times.size - 2, 1)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx))
    return FitResult(exponent=-slope, ci95=1.96 * stderr, stderr=stderr,
                     n_samples=int(times.size), window=window)


@dataclass(frozen=True)
class DecayReport:
    """Fitted decay exponents of the squared norms of one run."""

    p: float
    beta: float
    mu0: float
    t_star: float
    window: tuple[float, float]
    fit_u_sq: FitResult
    fit_grad_u_sq: FitResult

    def as_entries(self) -> dict:
        return {
            "p": self.p,
            "beta": self.beta,
            "two_beta": 2.0 * self.beta,
            "mu0": self.mu0,
            "t_star": self.t_star,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
            "exponent_u_sq": self.fit_u_sq.exponent,
            "exponent_u_sq_ci95": self.fit_u_sq.ci95,
            "exponent_grad_u_sq": self.fit_grad_u_sq.exponent,
            "exponent_grad_u_sq_ci95": self.fit_grad_u_sq.ci95,
            "samples": self.fit_u_sq.n_samples,
        }


def fit_decay_report(times, l2_u, l2_grad_u, p: float, mu0: float, l: float,
                     window: tuple[float, float] | None = None,
                     k_c: float | None = None) -> DecayReport:
    t_star = box_validity_cutoff(l, mu0)
    if window is None:
        if k_c is None:
            raise ValueError("supply either a fit window or k_c for the default")
        window = default_fit_window(k_c, mu0, l)
    if not (0.0 < window[0] < window[1] <= t_star):
        raise ValueError(
            f"fit window {window} must sit inside the box-valid range (0, {t_star:.4g}]"
        )
    times = np.asarray(times, dtype=np.float64)
    fit_u = fit_decay_exponent(times, np.asarray(l2_u) ** 2, window)
    fit_g = fit_decay_exponent(times, np.asarray(l2_grad_u) ** 2, window)
    return DecayReport(p=p, beta=beta_exponent(p), mu0=mu0, t_star=t_star,
                       window=window, fit_u_sq=fit_u, fit_grad_u_sq=fit_g)


# ----------------------------------------------------------------------
# frequency splitting
# ----------------------------------------------------------------------

@dataclass
class SplittingReport:
    M: float
    g_numerator: float
    times: np.ndarray
    lhs_ddt: np.ndarray
    lhs_damping: np.ndarray
    rhs_lowfreq: np.ndarray
    violations: np.ndarray
    worst_violation: float
    scale: float

    def passes(self, tol: float) -> bool:
        return bool(self.worst_violation <= tol * self.scale)


def _g_squared(t: float, numerator: float) -> float:
    return numerator / ((E + t) * math.log(E + t))


def fourier_splitting_check(traj: Trajectory, M: float,
                            g_numerator: float = 2.0,
                            law: ViscosityLaw | None = None) -> SplittingReport:
    """Evaluate the splitting inequality at every stored snapshot."""
    if M <= 0:
        raise ValueError(f"splitting constant M must be positive, got {M}")
    g = traj.grid
    heat = traj.meta.get("kind") == "heat"
    if law is None:
        law = traj.law
    times, ddts, damps, rhss = [], [], [], []
    for i, t in enumerate(traj.snapshot_times):
        c1, c2, rho = traj.snapshots[i]
        u1n = _ifft(g, c1)
        u2n = _ifft(g, c2)
        if heat:
            mu0 = traj.meta["mu0"]
            ut1n = _ifft(g, -mu0 * g.k2 * c1)
            ut2n = _ifft(g, -mu0 * g.k2 * c2)
            rho_t = np.zeros_like(rho)
        else:
            state = traj.snapshot_state(i)
            ut = momentum_rhs(state, law)
            ut1n = ut.u1.to_nodal()
            ut2n = ut.u2.to_nodal()
            cr = np.fft.fft2(rho)
            drx = np.real(np.fft.ifft2(1j * g.kx_diff * cr))
            dry = np.real(np.fft.ifft2(1j * g.ky_diff * cr))
            adv = (u1n * drx + u2n * dry)
            rho_t = -np.real(np.fft.ifft2(np.fft.fft2(adv) * g.dealias_mask))
        ca = g.cell_area
        speed2 = u1n**2 + u2n**2
        ddt = float(np.sum(rho_t * speed2) * ca
                    + 2.0 * np.sum(rho * (u1n * ut1n + u2n * ut2n)) * ca)
        erho = float(np.sum(rho * speed2) * ca)
        g2 = _g_squared(t, g_numerator)
        radius = math.sqrt(0.5 * M * g2)
        ball = g.kmag <= radius
        lowfreq = float(g.l**2 * np.sum(
            (np.abs(c1) ** 2 + np.abs(c2) ** 2)[ball]))
        times.append(t)
        ddts.append(ddt)
        damps.append(g2 * erho)
        rhss.append(M * g2 * lowfreq)
    times = np.asarray(times)
    ddts = np.asarray(ddts)
    damps = np.asarray(damps)
    rhss = np.asarray(rhss)
    violations = ddts + damps - rhss
    scale = float(np.max(damps)) if damps.size else 0.0
    return SplittingReport(M=M, g_numerator=g_numerator, times=times,
                           lhs_ddt=ddts, lhs_damping=damps, rhs_lowfreq=rhss,
                           violations=violations,
                           worst_violation=float(np.max(violations)),
                           scale=max(scale, 1e-300))


def splitting_threshold(traj: Trajectory, M_values,
                        g_numerator: float = 2.0, tol: float = 1e-6,
                        law: ViscosityLaw | None = None
                        ) -> tuple[float | None, list[SplittingReport]]:
    """Smallest M in the sweep with no violation beyond tol * scale."""
    reports = []
    best = None
    for M in sorted(M_values):
        rep = fourier_splitting_check(traj, M, g_numerator, law)
        reports.append(rep)
        if best is None and rep.passes(tol):
            best = float(M)
    return best, reports


# ----------------------------------------------------------------------
# weighted energy ledgers
# ----------------------------------------------------------------------

WEIGHTS = ("t_plus_e", "t_plus_e_log", "t_plus_e_log2", "power", "interpolated")


def _weight_values(kind: str, t: np.ndarray, beta: float, eps: float,
                   r: float) -> np.ndarray:
    te = t + E
    if kind == "t_plus_e":
        return te
    if kind == "t_plus_e_log":
        return te * np.log(te)
    if kind == "t_plus_e_log2":
        return te * np.log(te) ** 2
    if kind == "power":
        return te ** (1.0 + 2.0 * beta - eps)
    if kind == "interpolated":
        # t^(1-r) (t+e)^(r + 2 beta - eps); finite at t = 0 for r <= 1
        return np.power(np.maximum(t, 0.0), 1.0 - r) * te ** (r + 2.0 * beta - eps)
    raise ValueError(f"unknown ledger weight {kind!r}; pick from {WEIGHTS}")


@dataclass
class EnergyLedger:
    """Weighted dissipation ledger along one trajectory.

    Columns: f(t) * integral of mu(rho)|grad u|^2 at each sample, plus the
    running time integrals of f |sqrt(rho) u_t|^2 and of f (|P div(mu M)|^2
    + |Q div(mu M) - grad Pi|^2).  All entries are nonnegative and the
    cumulative columns are nondecreasing by construction.
    """

    weight: str
    params: dict
    times: np.ndarray
    f_mu_grad_sq: np.ndarray
    cum_f_rho_ut_sq: np.ndarray
    cum_f_pq_sq: np.ndarray

    @property
    def sup_f_mu_grad_sq(self) -> float:
        return float(np.max(self.f_mu_grad_sq))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("t,f_mu_grad_sq,cum_f_rho_ut_sq,cum_f_pq_sq\n")
            for row in zip(self.times, self.f_mu_grad_sq,
                           self.cum_f_rho_ut_sq, self.cum_f_pq_sq):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def energy_ledger(traj: Trajectory, weight: str, p: float = 1.5,
                  eps: float = 0.1, r: float = 0.5) -> EnergyLedger:
    t = traj.diagnostics["t"]
    beta = beta_exponent(p)
    f = _weight_values(weight, t, beta, eps, r)
    mu_grad = traj.diagnostics["mu_grad_u_sq"]
    rho_ut = traj.diagnostics["rho_ut_sq"]
    pq = traj.diagnostics["p_div"] ** 2 + traj.diagnostics["q_div_minus_gradpi"] ** 2
    cum_ut = np.concatenate([[0.0], cumulative_trapezoid(f * rho_ut, t)])
    cum_pq = np.concatenate([[0.0], cumulative_trapezoid(f * pq, t)])
    return EnergyLedger(weight=weight,
                        params={"p": p, "beta": beta, "eps": eps, "r": r},
                        times=t, f_mu_grad_sq=f * mu_grad,
                        cum_f_rho_ut_sq=cum_ut, cum_f_pq_sq=cum_pq)
