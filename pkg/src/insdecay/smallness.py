"""Explicit constants of the decay theory and the smallness gate.

The two composite constants are polynomial-exponential expressions in four
norms of the data: ||u0||_{L^p}, ||u0||_{H^1}, ||u0||_{L^2} and
||rho0 - 1||_{L^2}.  They are assembled term by term so each monomial can
be audited (and tested) individually:

    K  = (Lp^2 + H1^2 + R2^2 + Lp^2 H1^2 + (1 + R2^2) H1^4) * exp(C L2^4)

    G1 = R2 + R2^7 + Lp + Lp^7 + H1 + Lp^7 H1^7 + (1 + R2^7) H1^14
    G2 = Lp^4 + H1^4 + R2^4 + Lp^4 H1^4 + (1 + R2^4) H1^8
    G  = G1 * exp(G2)

The admissibility gate for a viscosity perturbation is then

    ||mu(rho0) - mu0||_{B^{(eta+1)ln}_{inf,1}}
        * ((1 + mu0) G / mu0)^(eta+1)
        * exp((eta+1) * exp(C0 ||u0||_{L^2}^4))   <=   c0 * mu0

for a logarithmic index eta > 1.  With zero data every monomial vanishes,
so K = G = 0 and the gate passes with a zero left side; with
mu(rho0) = mu0 identically the Besov factor is zero and the gate passes
for any data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .besov import BesovSpec, besov_norm
from .spectral import (DensityField, SpectralField, VelocityField, lp_norm,
                       velocity_lp_norm, velocity_sobolev_norm)
from .viscosity import ViscosityLaw

__all__ = [
    "DataNorms",
    "data_norms",
    "compute_K",
    "compute_G",
    "k_term_table",
    "g1_term_table",
    "g2_term_table",
    "SmallnessReport",
    "check_smallness",
]


@dataclass(frozen=True)
class DataNorms:
    lp: float      # ||u0||_{L^p}
    h1: float      # ||u0||_{H^1}
    l2: float      # ||u0||_{L^2}
    rho_l2: float  # ||rho0 - 1||_{L^2}


def data_norms(u0: VelocityField, rho0: DensityField, p: float) -> DataNorms:
    dev = SpectralField.from_nodal(rho0.grid, rho0.values - 1.0)
    return DataNorms(
        lp=velocity_lp_norm(u0, p),
        h1=velocity_sobolev_norm(u0, 1.0),
        l2=velocity_lp_norm(u0, 2.0),
        rho_l2=lp_norm(dev, 2.0),
    )


def k_term_table(n: DataNorms) -> list[tuple[str, float]]:
    return [
        ("lp^2", n.lp**2),
        ("h1^2", n.h1**2),
        ("rho_l2^2", n.rho_l2**2),
        ("lp^2*h1^2", n.lp**2 * n.h1**2),
        ("h1^4", n.h1**4),
        ("rho_l2^2*h1^4", n.rho_l2**2 * n.h1**4),
    ]


def compute_K(n: DataNorms, C: float = 1.0) -> float:
    poly = sum(v for _, v in k_term_table(n))
    if poly == 0.0:
        return 0.0
    return poly * float(np.exp(C * n.l2**4))


def g1_term_table(n: DataNorms) -> list[tuple[str, float]]:
    return [
        ("rho_l2", n.rho_l2),
        ("rho_l2^7", n.rho_l2**7),
        ("lp", n.lp),
        ("lp^7", n.lp**7),
        ("h1", n.h1),
        ("lp^7*h1^7", n.lp**7 * n.h1**7),
        ("h1^14", n.h1**14),
        ("rho_l2^7*h1^14", n.rho_l2**7 * n.h1**14),
    ]


def g2_term_table(n: DataNorms) -> list[tuple[str, float]]:
    return [
        ("lp^4", n.lp**4),
        ("h1^4", n.h1**4),
        ("rho_l2^4", n.rho_l2**4),
        ("lp^4*h1^4", n.lp**4 * n.h1**4),
        ("h1^8", n.h1**8),
        ("rho_l2^4*h1^8", n.rho_l2**4 * n.h1**8),
    ]


def compute_G(n: DataNorms) -> tuple[float, float, float]:
    """Returns (G1, G2, G).  Zero data gives exactly (0, 0, 0)."""
    g1 = sum(v for _, v in g1_term_table(n))
    g2 = sum(v for _, v in g2_term_table(n))
    if g1 == 0.0:
        return 0.0, g2, 0.0
    return g1, g2, g1 * float(np.exp(g2))


@dataclass(frozen=True)
class SmallnessReport:
    K: float
    G1: float
    G2: float
    G: float
    besov_factor: float  # ||mu(rho0) - mu0|| in B^{(eta+1)ln}_{inf,1}
    lhs: float
    threshold: float
    eta: float
    C: float
    C0: float
    c0: float
    mu0: float
    norms: DataNorms

    @property
    def passed(self) -> bool:
        return self.lhs <= self.threshold

    def as_entries(self) -> dict:
        out = {
            "K": self.K, "G1": self.G1, "G2": self.G2, "G": self.G,
            "besov_factor": self.besov_factor, "lhs": self.lhs,
            "threshold": self.threshold, "eta": self.eta,
            "C": self.C, "C0": self.C0, "c0": self.c0, "mu0": self.mu0,
            "norm_lp": self.norms.lp, "norm_h1": self.norms.h1,
            "norm_l2": self.norms.l2, "norm_rho_l2": self.norms.rho_l2,
            "passed": self.passed,
        }
        return out


def check_smallness(u0: VelocityField, rho0: DensityField, law: ViscosityLaw,
                    eta: float, p: float = 1.5, C: float = 1.0,
                    C0: float = 1.0, c0: float = 0.01) -> SmallnessReport:
    """Evaluate the viscosity-perturbation admissibility gate."""
    if eta <= 1.0:
        raise ValueError(f"the gate needs eta > 1, got {eta}")
    norms = data_norms(u0, rho0, p)
    K = compute_K(norms, C)
    g1, g2, G = compute_G(norms)
    dev = SpectralField.from_nodal(rho0.grid, law(rho0.values) - law.mu0)
    bnorm = besov_norm(dev, BesovSpec.log(eta + 1.0))
    mu0 = law.mu0
    if bnorm == 0.0:
        lhs = 0.0
    else:
        lhs = (bnorm * ((1.0 + mu0) * G / mu0) ** (eta + 1.0)
               * float(np.exp((eta + 1.0) * np.exp(C0 * norms.l2**4))))
    return SmallnessReport(K=K, G1=g1, G2=g2, G=G, besov_factor=bnorm,
                           lhs=lhs, threshold=c0 * mu0, eta=eta,
                           C=C, C0=C0, c0=c0, mu0=mu0, norms=norms)
