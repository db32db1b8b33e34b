"""Density-dependent viscosity laws mu(rho) with mu(1) = mu0."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = ["ViscosityLaw"]


@dataclass(frozen=True)
class ViscosityLaw:
    """Smooth positive viscosity as a function of density.

    kind = "affine":  mu = mu0 + slope * (rho - 1)
    kind = "power":   mu = mu0 * rho**exponent
    kind = "table":   cubic spline through (rho_i, mu_i) pairs

    `validate_range` raises if the law can reach a nonpositive value on the
    density interval a run will visit; the solver calls it up front so a bad
    parameter choice fails loudly instead of producing negative dissipation.
    """

    kind: str
    mu0: float
    slope: float = 0.0
    exponent: float = 0.0
    table: tuple[tuple[float, float], ...] = ()
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.mu0 <= 0:
            raise ValueError(f"mu0 must be positive, got {self.mu0}")
        if self.kind not in ("affine", "power", "table"):
            raise ValueError(f"unknown viscosity law kind {self.kind!r}")
        if self.kind == "table":
            if len(self.table) < 4:
                raise ValueError("table law needs at least 4 points")
            pts = sorted(self.table)
            xs = np.array([p[0] for p in pts])
            ys = np.array([p[1] for p in pts])
            if np.any(np.diff(xs) <= 0):
                raise ValueError("table abscissae must be strictly increasing")
            spline = CubicSpline(xs, ys)
            if abs(float(spline(1.0)) - self.mu0) > 1e-8 * self.mu0:
                raise ValueError(
                    f"table law must satisfy mu(1) = mu0, got {float(spline(1.0)):.6e}"
                )
            object.__setattr__(self, "_spline", spline)

    @classmethod
    def affine(cls, mu0: float, slope: float) -> "ViscosityLaw":
        return cls(kind="affine", mu0=mu0, slope=slope)

    @classmethod
    def power(cls, mu0: float, exponent: float) -> "ViscosityLaw":
        return cls(kind="power", mu0=mu0, exponent=exponent)

    @classmethod
    def from_table(cls, mu0: float, table) -> "ViscosityLaw":
        return cls(kind="table", mu0=mu0, table=tuple(tuple(p) for p in table))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.float64)
        if self.kind == "affine":
            return self.mu0 + self.slope * (rho - 1.0)
        if self.kind == "power":
            return self.mu0 * rho**self.exponent
        return np.asarray(self._spline(rho), dtype=np.float64)

    def validate_range(self, rho_min: float, rho_max: float) -> None:
        if rho_min <= 0:
            raise ValueError(f"density range must be positive, min = {rho_min}")
        sample = np.linspace(rho_min, rho_max, 257)
        mu = self(sample)
        if np.min(mu) <= 0:
            raise ValueError(
                f"viscosity law reaches {np.min(mu):.3e} <= 0 on "
                f"[{rho_min:.3f}, {rho_max:.3f}]"
            )
