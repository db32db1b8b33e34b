"""Seeded initial data for decay experiments.

Velocities are built as u0 = perp-grad(psi) with random-phase stream
functions, so they are solenoidal by construction.  The spectral profile
controls the integrability class of u0: a modulus that is flat on a disk
mimics data whose transform is merely bounded (the L^1-like end of the
L^p scale), while |xi|^sigma tilts give interpolating classes.  Profiles
prescribe |hat u0| directly; since |hat u0| = |xi| |hat psi| the stream
function gets the profile divided by |xi|.

All randomness comes from one seed through numpy's Philox counter-based
generator, so runs are reproducible across processes and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .spectral import (DensityField, SpectralField, VelocityField,
                       velocity_lp_norm, velocity_sobolev_norm)

__all__ = ["InitialDataSpec", "gen_initial_velocity", "gen_initial_density",
           "make_rng", "hat_lp_norm", "taylor_green"]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class InitialDataSpec:
    """Recipe for u0.

    target_p : the L^p class the data represents, p in (1, 2).
    profile  : "flat_disk" (|hat u0| = amplitude for 0 < |xi| <= k_c) or
               "power" (|hat u0| = amplitude * |xi|^sigma on the same disk).
    regularity : "h1" leaves the profile as is; ("h_alpha", alpha) is
               accepted for reporting the matching Sobolev norm.
    """

    amplitude: float
    k_c: float
    profile: str = "flat_disk"
    sigma: float = 0.0
    target_p: float = 1.5
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1.0 < self.target_p < 2.0:
            raise ValueError(f"target_p must lie in (1, 2), got {self.target_p}")
        if self.amplitude <= 0 or self.k_c <= 0:
            raise ValueError("amplitude and k_c must be positive")
        if self.profile not in ("flat_disk", "power"):
            raise ValueError(f"unknown profile {self.profile!r}")


def _unit_phases(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Hermitian random unit-modulus coefficients (phases of real noise)."""
    noise = np.fft.fft2(rng.standard_normal((grid.n, grid.n)))
    mag = np.abs(noise)
    mag[mag == 0.0] = 1.0
    return noise / mag


def gen_initial_velocity(spec: InitialDataSpec, grid: Grid
                         ) -> tuple[VelocityField, dict]:
    """Build u0 and report its norms.

    The profile must fit inside the dealiased annulus; otherwise the grid
    cannot represent the requested data and we refuse.
    """
    if spec.k_c > grid.kcut:
        raise ValueError(
            f"profile cutoff k_c = {spec.k_c:.3g} exceeds the dealiased range "
            f"{grid.kcut:.3g}; refine the grid or shrink k_c"
        )
    kmag = grid.kmag
    inside = (kmag > 0.0) & (kmag <= spec.k_c)
    target = np.zeros_like(kmag)
    if spec.profile == "flat_disk":
        target[inside] = spec.amplitude
    else:
        target[inside] = spec.amplitude * kmag[inside] ** spec.sigma

    # |hat u| target -> stream function modulus; hat u = i k-perp hat psi
    psi_mod = np.zeros_like(kmag)
    psi_mod[inside] = target[inside] / kmag[inside]
    phases = _unit_phases(grid, make_rng(spec.seed))
    # hat psi in the mean-normalized coefficient convention: hat u = l^2 c
    cpsi = (psi_mod / grid.l**2) * phases
    c1 = -1j * grid.ky * cpsi
    c2 = 1j * grid.kx * cpsi
    u = VelocityField(SpectralField(grid, c1), SpectralField(grid, c2),
                      trusted=True)

    pprime = spec.target_p / (spec.target_p - 1.0)
    report = {
        "l2": velocity_lp_norm(u, 2.0),
        "lp": velocity_lp_norm(u, spec.target_p),
        "hat_lp_prime": hat_lp_norm(u, pprime),
        "hat_linf": hat_lp_norm(u, np.inf),
        "h1": velocity_sobolev_norm(u, 1.0),
        "h_alpha": velocity_sobolev_norm(u, spec.alpha),
    }
    return u, report


def hat_lp_norm(u: VelocityField, p: float) -> float:
    """L^p norm of the transform of the speed, continuum normalization.

    hat u(xi_k) = l^2 c_k and the mode cell measure is (2 pi / l)^2.
    """
    g = u.grid
    mag = g.l**2 * np.sqrt(np.abs(u.u1.coeffs) ** 2 + np.abs(u.u2.coeffs) ** 2)
    if p == np.inf:
        return float(np.max(mag))
    dxi = (2.0 * np.pi / g.l) ** 2
    return float((np.sum(mag**p) * dxi) ** (1.0 / p))


def gen_initial_density(grid: Grid, contrast: float, k_band: float = 4.0,
                        seed: int = 0) -> DensityField:
    """rho0 = 1 + contrast * w with smooth w, max|w| = 1 exactly."""
    if not 0.0 <= contrast < 1.0:
        raise ValueError(f"contrast must lie in [0, 1), got {contrast}")
    if contrast == 0.0:
        return DensityField(grid, np.ones((grid.n, grid.n)))
    rng = make_rng(seed + 7_654_321)
    kmag = grid.kmag
    band = (kmag > 0.0) & (kmag <= k_band)
    if not band.any():
        raise ValueError(f"no modes below k_band = {k_band}; enlarge the box")
    phases = _unit_phases(grid, rng)
    c = np.where(band, phases, 0.0) * np.exp(-(kmag / k_band) ** 2)
    w = SpectralField(grid, c).to_nodal()
    w /= np.max(np.abs(w))
    return DensityField(grid, 1.0 + contrast * w)


def taylor_green(grid: Grid, amplitude: float = 1.0) -> VelocityField:
    """Single-cell vortex lattice; under constant viscosity mu0 it decays
    self-similarly with amplitude factor exp(-2 mu0 (2 pi / l)^2 t)."""
    x, y = grid.xy
    k = 2.0 * np.pi / grid.l
    u1 = amplitude * np.sin(k * x) * np.cos(k * y)
    u2 = -amplitude * np.cos(k * x) * np.sin(k * y)
    return VelocityField(SpectralField.from_nodal(grid, u1),
                         SpectralField.from_nodal(grid, u2), trusted=True)
