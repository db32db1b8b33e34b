"""Spectral fields and the Fourier-side operator toolbox.

Coefficients are normalized so that ``coeffs[0, 0]`` is the spatial mean:
``coeffs = fft2(nodal) / n**2``.  With that convention Parseval reads

    sum |f(x_i)|^2 * (l/n)^2 = l^2 * sum_k |c_k|^2,

which is what `l2_spectral` evaluates; `lp_norm` uses the nodal rectangle
rule so the two routes can be checked against each other.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid

__all__ = [
    "SpectralField",
    "VelocityField",
    "DensityField",
    "gradient",
    "divergence",
    "laplacian",
    "leray_project",
    "leray_complement",
    "riesz",
    "lp_norm",
    "lp_norm_nodal",
    "sobolev_norm",
    "l2_spectral",
    "velocity_lp_norm",
    "velocity_sobolev_norm",
    "random_field",
    "random_solenoidal",
]


class SpectralField:
    """A real scalar field stored by its Fourier coefficients.

    Hermitian symmetry (c_{-k} = conj(c_k)) is the standing invariant; it is
    cheap to check and `hermitian_residual` does so, but hot paths do not
    re-validate on every operation.
    """

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: Grid, coeffs: np.ndarray, check: bool = False):
        if coeffs.shape != (grid.n, grid.n):
            raise ValueError(
                f"coefficient array shape {coeffs.shape} does not match grid n={grid.n}"
            )
        self.grid = grid
        self.coeffs = np.asarray(coeffs, dtype=np.complex128)
        if check:
            res = self.hermitian_residual()
            if res > 1e-12:
                raise ValueError(f"Hermitian symmetry violated: residual {res:.3e}")

    # -- construction --------------------------------------------------

    @classmethod
    def from_nodal(cls, grid: Grid, nodal: np.ndarray) -> "SpectralField":
        nodal = np.asarray(nodal, dtype=np.float64)
        if nodal.shape != (grid.n, grid.n):
            raise ValueError(
                f"nodal array shape {nodal.shape} does not match grid n={grid.n}"
            )
        return cls(grid, np.fft.fft2(nodal) / grid.n**2)

    @classmethod
    def zero(cls, grid: Grid) -> "SpectralField":
        return cls(grid, grid.zeros_coeffs())

    # -- transforms ----------------------------------------------------

    def to_nodal(self) -> np.ndarray:
        return np.real(np.fft.ifft2(self.coeffs)) * self.grid.n**2

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    # -- diagnostics ---------------------------------------------------

    def mean(self) -> float:
        return float(np.real(self.coeffs[0, 0]))

    def hermitian_residual(self) -> float:
        """Relative departure from c_{-k} = conj(c_k)."""
        c = self.coeffs
        mirror = np.conj(c[np.ix_(-np.arange(self.grid.n) % self.grid.n,
                                  -np.arange(self.grid.n) % self.grid.n)])
        num = np.linalg.norm(c - mirror)
        den = max(np.linalg.norm(c), 1e-300)
        return float(num / den)

    def dealiased(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * self.grid.dealias_mask)

    # -- arithmetic (coefficient-linear ops only) ------------------------

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._same_grid(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._same_grid(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, a: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * a)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def _same_grid(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


class VelocityField:
    """Divergence-free velocity pair.  Construct through `leray_project`
    (or `trusted=True` when the caller already guarantees solenoidality)."""

    __slots__ = ("grid", "u1", "u2")

    def __init__(self, u1: SpectralField, u2: SpectralField, trusted: bool = False):
        if u1.grid != u2.grid:
            raise ValueError("velocity components live on different grids")
        self.grid = u1.grid
        self.u1 = u1
        self.u2 = u2
        if not trusted:
            res = self.divergence_residual()
            if res > 1e-10:
                raise ValueError(
                    f"velocity is not solenoidal: relative divergence {res:.3e}"
                )

    def divergence_residual(self) -> float:
        g = self.grid
        div = 1j * (g.kx_diff * self.u1.coeffs + g.ky_diff * self.u2.coeffs)
        scale = np.sqrt(np.sum(g.k2 * (np.abs(self.u1.coeffs) ** 2
                                       + np.abs(self.u2.coeffs) ** 2)))
        return float(np.linalg.norm(div) / max(scale, 1e-300))

    def max_speed(self) -> float:
        n1 = self.u1.to_nodal()
        n2 = self.u2.to_nodal()
        return float(np.max(np.hypot(n1, n2)))

    def copy(self) -> "VelocityField":
        return VelocityField(self.u1.copy(), self.u2.copy(), trusted=True)


class DensityField:
    """Nodal density.  Positive by contract unless `require_positive=False`
    (block-transport experiments move signed Littlewood-Paley pieces)."""

    __slots__ = ("grid", "values", "require_positive")

    def __init__(self, grid: Grid, values: np.ndarray, require_positive: bool = True):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n, grid.n):
            raise ValueError(
                f"density array shape {values.shape} does not match grid n={grid.n}"
            )
        if require_positive and np.min(values) <= 0.0:
            raise ValueError(f"density must be positive, min = {np.min(values):.3e}")
        self.grid = grid
        self.values = values
        self.require_positive = require_positive

    def mean(self) -> float:
        return float(np.mean(self.values))

    def bounds(self) -> tuple[float, float]:
        return float(np.min(self.values)), float(np.max(self.values))

    def copy(self) -> "DensityField":
        return DensityField(self.grid, self.values.copy(),
                            require_positive=self.require_positive)


# ----------------------------------------------------------------------
# differential operators
# ----------------------------------------------------------------------

def gradient(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    """(d/dx f, d/dy f); the unpaired Nyquist column carries k=0."""
    g = f.grid
    return (SpectralField(g, 1j * g.kx_diff * f.coeffs),
            SpectralField(g, 1j * g.ky_diff * f.coeffs))


def divergence(v1: SpectralField, v2: SpectralField) -> SpectralField:
    g = v1.grid
    return SpectralField(g, 1j * (g.kx_diff * v1.coeffs + g.ky_diff * v2.coeffs))


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, -f.grid.k2 * f.coeffs)


def leray_project(v1: SpectralField, v2: SpectralField) -> VelocityField:
    """Remove the gradient part: w = v - k (k.v)/|k|^2, k = 0 passed through."""
    g = v1.grid
    kdotv = (g.kx * v1.coeffs + g.ky * v2.coeffs) / g.k2_safe
    kdotv[0, 0] = 0.0
    w1 = SpectralField(g, v1.coeffs - g.kx * kdotv)
    w2 = SpectralField(g, v2.coeffs - g.ky * kdotv)
    return VelocityField(w1, w2, trusted=True)


def leray_complement(v1: SpectralField, v2: SpectralField) -> tuple[SpectralField, SpectralField]:
    """The gradient part Q v = grad(inverse-Laplacian div v); zero at k = 0."""
    g = v1.grid
    kdotv = (g.kx * v1.coeffs + g.ky * v2.coeffs) / g.k2_safe
    kdotv[0, 0] = 0.0
    return (SpectralField(g, g.kx * kdotv), SpectralField(g, g.ky * kdotv))


def riesz(f: SpectralField, axis: int) -> SpectralField:
    """Riesz transform along `axis`: symbol i k_axis / |k|, zero at k = 0."""
    g = f.grid
    k = g.kx if axis == 0 else g.ky
    sym = 1j * k / np.sqrt(g.k2_safe)
    out = sym * f.coeffs
    out[0, 0] = 0.0
    return SpectralField(g, out)


# ----------------------------------------------------------------------
# norms
# ----------------------------------------------------------------------

def lp_norm_nodal(nodal: np.ndarray, p: float, grid: Grid) -> float:
    """Rectangle-rule L^p norm of a nodal array; p = inf gives the max."""
    if p == np.inf:
        return float(np.max(np.abs(nodal)))
    if p < 1:
        raise ValueError(f"L^p norm requires p >= 1, got {p}")
    return float((np.sum(np.abs(nodal) ** p) * grid.cell_area) ** (1.0 / p))


def lp_norm(f: SpectralField, p: float) -> float:
    return lp_norm_nodal(f.to_nodal(), p, f.grid)


def l2_spectral(f: SpectralField) -> float:
    """L^2 norm evaluated on the coefficient side (Parseval)."""
    return float(f.grid.l * np.linalg.norm(f.coeffs))


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Inhomogeneous H^s norm: multiplier (1 + |k|^2)^(s/2) in L^2."""
    g = f.grid
    w = (1.0 + g.k2) ** s
    return float(g.l * np.sqrt(np.sum(w * np.abs(f.coeffs) ** 2)))


def velocity_lp_norm(u: VelocityField, p: float) -> float:
    """L^p norm of the pointwise speed |u|."""
    speed = np.hypot(u.u1.to_nodal(), u.u2.to_nodal())
    return lp_norm_nodal(speed, p, u.grid)


def velocity_sobolev_norm(u: VelocityField, s: float) -> float:
    return float(np.sqrt(sobolev_norm(u.u1, s) ** 2 + sobolev_norm(u.u2, s) ** 2))


# ----------------------------------------------------------------------
# random test fields
# ----------------------------------------------------------------------

def random_field(grid: Grid, rng: np.random.Generator, mean_free: bool = True,
                 dealias: bool = True) -> SpectralField:
    """Gaussian random field, band-limited to the dealiased range by default
    so odd spectral symbols never meet unpaired Nyquist content."""
    nodal = rng.standard_normal((grid.n, grid.n))
    f = SpectralField.from_nodal(grid, nodal)
    c = f.coeffs
    if dealias:
        c = c * grid.dealias_mask
    if mean_free:
        c[0, 0] = 0.0
    return SpectralField(grid, c)


def random_solenoidal(grid: Grid, rng: np.random.Generator) -> VelocityField:
    v1 = random_field(grid, rng)
    v2 = random_field(grid, rng)
    return leray_project(v1, v2)
