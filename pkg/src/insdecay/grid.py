"""Periodic grid and wavenumber bookkeeping for the square box [0, l)^2.

All spectral machinery in this package lives on an n-by-n uniform grid with
the numpy FFT mode ordering.  Physical wavenumbers are 2*pi/l * k with
integer k in [-n/2, n/2), so a field and its coefficients always agree about
units regardless of the box size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["Grid"]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, l)^2 with n points per side.

    Parameters
    ----------
    n : int
        Points per side.  Must be even and at least 8 so the dealiased
        annulus is non-trivial.
    l : float
        Box side length.
    dealias_fraction : float
        Fraction of the Nyquist range kept by the dealias mask.  The 2/3
        rule is the default; products of two masked fields are then exact
        on the retained modes.
    """

    n: int
    l: float
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if self.n % 2 != 0 or self.n < 8:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if not self.l > 0:
            raise ValueError(f"box side must be positive, got {self.l}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError(
                f"dealias_fraction must be in (0, 1], got {self.dealias_fraction}"
            )

    # ------------------------------------------------------------------
    # geometry
    # ------------------------------------------------------------------

    @cached_property
    def dx(self) -> float:
        return self.l / self.n

    @cached_property
    def cell_area(self) -> float:
        return (self.l / self.n) ** 2

    @cached_property
    def x(self) -> np.ndarray:
        """Nodal coordinates along one axis."""
        return np.arange(self.n) * (self.l / self.n)

    @cached_property
    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodal coordinate meshes, indexed [i, j] <-> (x_i, y_j)."""
        x = self.x
        return np.meshgrid(x, x, indexing="ij")

    # ------------------------------------------------------------------
    # wavenumbers
    # ------------------------------------------------------------------

    @cached_property
    def k1(self) -> np.ndarray:
        """Wavenumbers along one axis in FFT order, units 2*pi/l."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.l / self.n)

    @cached_property
    def kx(self) -> np.ndarray:
        return np.broadcast_to(self.k1[:, None], (self.n, self.n))

    @cached_property
    def ky(self) -> np.ndarray:
        return np.broadcast_to(self.k1[None, :], (self.n, self.n))

    @cached_property
    def k2(self) -> np.ndarray:
        return self.kx**2 + self.ky**2

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @cached_property
    def k2_safe(self) -> np.ndarray:
        # |k|^2 with the zero mode patched to 1 so symbols like k_i k_j/|k|^2
        # can be formed without warnings; callers zero the DC entry themselves.
        k2 = self.k2.copy()
        k2[0, 0] = 1.0
        return k2

    @cached_property
    def kmax(self) -> float:
        """Largest |k| on the grid (the corner mode)."""
        return float(np.max(self.kmag))

    @cached_property
    def kx_diff(self) -> np.ndarray:
        """Differentiation wavenumbers: the unpaired Nyquist column is zeroed
        so odd multipliers keep real fields real."""
        k = self.k1.copy()
        k[self.n // 2] = 0.0
        return np.broadcast_to(k[:, None], (self.n, self.n))

    @cached_property
    def ky_diff(self) -> np.ndarray:
        k = self.k1.copy()
        k[self.n // 2] = 0.0
        return np.broadcast_to(k[None, :], (self.n, self.n))

    # ------------------------------------------------------------------
    # dealiasing
    # ------------------------------------------------------------------

    @cached_property
    def kcut(self) -> float:
        """Dealias cutoff in physical wavenumber units (per axis)."""
        return self.dealias_fraction * (2.0 * np.pi / self.l) * (self.n / 2)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        cut = self.kcut
        keep1 = np.abs(self.k1) <= cut + 1e-12 * max(cut, 1.0)
        return keep1[:, None] & keep1[None, :]

    # ------------------------------------------------------------------
    # dyadic bookkeeping
    # ------------------------------------------------------------------

    @cached_property
    def j_max(self) -> int:
        """Smallest j with 2^j * 3/4 > kmax; dyadic blocks above it vanish."""
        return math.floor(math.log2(self.kmax * 4.0 / 3.0)) + 1

    # ------------------------------------------------------------------
    # helpers
    # ------------------------------------------------------------------

    def zeros_nodal(self) -> np.ndarray:
        return np.zeros((self.n, self.n), dtype=np.float64)

    def zeros_coeffs(self) -> np.ndarray:
        return np.zeros((self.n, self.n), dtype=np.complex128)
