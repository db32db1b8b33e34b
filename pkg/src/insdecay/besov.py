"""Discrete Littlewood-Paley decomposition and Besov norms.

The dyadic cutoffs come from one smooth radial bump chi (equal to 1 inside
radius 3/4, vanishing outside 4/3) through the telescoping construction
phi(xi) = chi(xi/2) - chi(xi).  Block j then carries the multiplier
phi(2^-j |k|), block -1 carries chi(|k|), and the partition

    chi(|k|) + sum_{j>=0} phi(2^-j |k|) = chi(2^-(J+1) |k|) = 1

is exact on the grid once J is large enough that the rescaled bump sees
every mode inside its plateau.  That makes reconstruction a telescoping
identity rather than an approximation, so block sums recover fields to
roundoff and the partition check in the acceptance suite is structural.

Only the l^1 realization of the logarithmic scale is provided; nothing in
the decay or transport machinery needs the weaker l^r variants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .spectral import SpectralField, lp_norm_nodal

__all__ = [
    "BesovSpec",
    "LittlewoodPaley",
    "DyadicDecomposition",
    "dyadic_block",
    "low_pass",
    "besov_norm",
    "bony_decompose",
    "verify_bernstein",
    "heat_block_decay",
    "random_annulus_field",
]

_CHI_ONE = 3.0 / 4.0   # chi == 1 for r <= 3/4
_CHI_ZERO = 4.0 / 3.0  # chi == 0 for r >= 4/3


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=np.float64)
    up = np.zeros_like(t)
    dn = np.zeros_like(t)
    pos = t > 0.0
    neg = (1.0 - t) > 0.0
    up[pos] = np.exp(-1.0 / t[pos])
    dn[neg] = np.exp(-1.0 / (1.0 - t[neg]))
    return up / (up + dn)


def chi_bump(r: np.ndarray) -> np.ndarray:
    """Radial low-pass bump: 1 on [0, 3/4], 0 on [4/3, inf)."""
    return _smooth_step((_CHI_ZERO - np.asarray(r, dtype=np.float64))
                        / (_CHI_ZERO - _CHI_ONE))


def phi_bump(r: np.ndarray) -> np.ndarray:
    """Annulus bump chi(r/2) - chi(r), supported in [3/4, 8/3]."""
    r = np.asarray(r, dtype=np.float64)
    return chi_bump(r / 2.0) - chi_bump(r)


@dataclass(frozen=True)
class BesovSpec:
    """Norm selector: classical B^s_{p,r} or logarithmic B^{eta ln}_{inf,1}."""

    kind: str
    s: float = 0.0
    p: float = np.inf
    r: float = np.inf
    eta: float = 0.0

    @classmethod
    def classical(cls, s: float, p: float, r: float) -> "BesovSpec":
        if p < 1 or r < 1:
            raise ValueError(f"Besov indices require p, r >= 1, got p={p}, r={r}")
        return cls(kind="classical", s=s, p=p, r=r)

    @classmethod
    def log(cls, eta: float) -> "BesovSpec":
        if eta <= 0:
            raise ValueError(f"logarithmic index must be positive, got eta={eta}")
        return cls(kind="log", eta=eta)


class LittlewoodPaley:
    """Per-grid stack of dyadic multipliers, built once and cached."""

    _cache: dict[Grid, "LittlewoodPaley"] = {}

    def __init__(self, grid: Grid):
        self.grid = grid
        self.j_max = grid.j_max
        kmag = grid.kmag
        # chi ladder: chi(2^-i |k|) for i = 0 .. j_max + 1
        ladder = np.stack([chi_bump(kmag / 2.0**i) for i in range(self.j_max + 2)])
        nblocks = self.j_max + 2  # j = -1 .. j_max
        mult = np.empty((nblocks, grid.n, grid.n))
        mult[0] = ladder[0]
        for j in range(self.j_max + 1):
            mult[1 + j] = ladder[j + 1] - ladder[j]
        self.multipliers = mult
        self.chi_ladder = ladder
        resid = float(np.max(np.abs(mult.sum(axis=0) - 1.0)))
        if resid > 1e-13:
            raise AssertionError(
                f"dyadic partition failed to telescope on the grid: {resid:.3e}"
            )
        self.partition_residual = resid

    @classmethod
    def for_grid(cls, grid: Grid) -> "LittlewoodPaley":
        lp = cls._cache.get(grid)
        if lp is None:
            lp = cls(grid)
            cls._cache[grid] = lp
        return lp

    # ------------------------------------------------------------------

    def block_index(self, j: int) -> int:
        if j < -1 or j > self.j_max:
            raise ValueError(f"block index {j} outside [-1, {self.j_max}]")
        return j + 1

    def multiplier(self, j: int) -> np.ndarray:
        return self.multipliers[self.block_index(j)]

    def support_annulus(self, j: int) -> tuple[float, float]:
        """Closure of the block-j frequency support."""
        if j == -1:
            return (0.0, _CHI_ZERO)
        return (_CHI_ONE * 2.0**j, 2.0 * _CHI_ZERO * 2.0**j)

    def low_pass_multiplier(self, j: int) -> np.ndarray:
        """Multiplier of S_j = sum of blocks below j; empty sum for j <= -1."""
        if j <= -1:
            return np.zeros((self.grid.n, self.grid.n))
        if j >= self.j_max + 1:
            return np.ones((self.grid.n, self.grid.n))
        return self.chi_ladder[j]

    # ------------------------------------------------------------------

    def block_nodal_stack(self, f: SpectralField) -> np.ndarray:
        """All block fields of f in physical space, shape (j_max+2, n, n)."""
        coeffs = self.multipliers * f.coeffs[None, :, :]
        return np.real(np.fft.ifft2(coeffs, axes=(-2, -1))) * self.grid.n**2

    def block_lp_norms(self, f: SpectralField, p: float) -> np.ndarray:
        stack = self.block_nodal_stack(f)
        if p == np.inf:
            return np.max(np.abs(stack), axis=(1, 2))
        return (np.sum(np.abs(stack) ** p, axis=(1, 2))
                * self.grid.cell_area) ** (1.0 / p)


@dataclass
class DyadicDecomposition:
    """Blocks of one field, indexed j = -1 .. j_max."""

    grid: Grid
    blocks: list[SpectralField]

    @property
    def j_max(self) -> int:
        return len(self.blocks) - 2

    def block(self, j: int) -> SpectralField:
        if j < -1 or j > self.j_max:
            raise ValueError(f"block index {j} outside [-1, {self.j_max}]")
        return self.blocks[j + 1]

    def reconstruct(self) -> SpectralField:
        total = self.grid.zeros_coeffs()
        for b in self.blocks:
            total += b.coeffs
        return SpectralField(self.grid, total)


def dyadic_block(f: SpectralField, j: int) -> SpectralField:
    lp = LittlewoodPaley.for_grid(f.grid)
    return SpectralField(f.grid, lp.multiplier(j) * f.coeffs)


def decompose(f: SpectralField) -> DyadicDecomposition:
    lp = LittlewoodPaley.for_grid(f.grid)
    blocks = [SpectralField(f.grid, lp.multipliers[i] * f.coeffs)
              for i in range(lp.j_max + 2)]
    return DyadicDecomposition(grid=f.grid, blocks=blocks)


def low_pass(f: SpectralField, j: int) -> SpectralField:
    lp = LittlewoodPaley.for_grid(f.grid)
    return SpectralField(f.grid, lp.low_pass_multiplier(j) * f.coeffs)


def besov_norm(f: SpectralField, spec: BesovSpec) -> float:
    lp = LittlewoodPaley.for_grid(f.grid)
    js = np.arange(-1, lp.j_max + 1)
    if spec.kind == "log":
        norms = lp.block_lp_norms(f, np.inf)
        return float(np.sum((2.0 + js) ** spec.eta * norms))
    norms = lp.block_lp_norms(f, spec.p)
    weighted = 2.0 ** (js * spec.s) * norms
    if spec.r == np.inf:
        return float(np.max(weighted))
    return float(np.sum(weighted ** spec.r) ** (1.0 / spec.r))


# ----------------------------------------------------------------------
# paraproducts
# ----------------------------------------------------------------------

def bony_decompose(a: SpectralField, b: SpectralField
                   ) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Split ab into (T_a b, T_b a, R(a, b)).

    T_a b = sum_j S_{j-1} a . Delta_j b and R pairs blocks with |j-k| <= 1.
    Every product is formed nodally and dealiased, so for fields already
    inside the 2/3 mask the three parts sum exactly to the dealiased
    pointwise product.
    """
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    g = a.grid
    lp = LittlewoodPaley.for_grid(g)
    jm = lp.j_max
    A = lp.block_nodal_stack(a)
    B = lp.block_nodal_stack(b)

    def paraproduct(ablocks: np.ndarray, bblocks: np.ndarray) -> np.ndarray:
        # sum_j S_{j-1}a . Delta_j b with the running sum lagging two blocks
        out = np.zeros((g.n, g.n))
        run = np.zeros((g.n, g.n))  # S_{-2} = S_{-1} = 0
        for j in range(-1, jm + 1):
            if j >= 1:
                run = run + ablocks[j - 1]  # absorb Delta_{j-2}, run = S_{j-1}
            out += run * bblocks[j + 1]
        return out

    t_ab = paraproduct(A, B)
    t_ba = paraproduct(B, A)

    rem = np.zeros((g.n, g.n))
    for j in range(-1, jm + 1):
        near = B[j + 1].copy()
        if j - 1 >= -1:
            near += B[j]
        if j + 1 <= jm:
            near += B[j + 2]
        rem += A[j + 1] * near

    def to_spec(nodal: np.ndarray) -> SpectralField:
        out = np.fft.fft2(nodal) / g.n**2
        return SpectralField(g, out * g.dealias_mask)

    return to_spec(t_ab), to_spec(t_ba), to_spec(rem)


# ----------------------------------------------------------------------
# inequality probes
# ----------------------------------------------------------------------

def verify_bernstein(f: SpectralField, j: int, p: float, q: float,
                     order: tuple[int, int] = (0, 0)) -> float:
    """Ratio ||d^order f||_q / (2^(j|order| + 2j(1/p - 1/q)) ||f||_p).

    The caller supplies f band-limited near scale 2^j; boundedness of the
    ratio over scales is the discrete Bernstein statement.  Zero f gives 0.
    """
    if q < p:
        raise ValueError(f"Bernstein direction requires q >= p, got p={p}, q={q}")
    g = f.grid
    denom_norm = lp_norm_nodal(f.to_nodal(), p, g)
    if denom_norm == 0.0:
        return 0.0
    a1, a2 = order
    sym = (1j * g.kx_diff) ** a1 * (1j * g.ky_diff) ** a2
    deriv = SpectralField(g, sym * f.coeffs)
    num = lp_norm_nodal(deriv.to_nodal(), q, g)
    inv_p = 0.0 if p == np.inf else 1.0 / p
    inv_q = 0.0 if q == np.inf else 1.0 / q
    scale = 2.0 ** (j * (a1 + a2) + 2.0 * j * (inv_p - inv_q))
    return float(num / (scale * denom_norm))


def heat_block_decay(f: SpectralField, lam: float, t: float, p: float = 2.0
                     ) -> float:
    """Decay ratio ||exp(t Lap) g||_p / ||g||_p for g = phi(D/lam) f.

    For p = 2 the ratio sits inside [exp(-t (8 lam/3)^2), exp(-t (3 lam/4)^2)]
    because the filtered spectrum lives in that annulus.  Returns 0 for g = 0.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    g = f.grid
    filt = phi_bump(g.kmag / lam) * f.coeffs
    base = SpectralField(g, filt)
    nb = lp_norm_nodal(base.to_nodal(), p, g)
    if nb == 0.0:
        return 0.0
    heated = SpectralField(g, np.exp(-t * g.k2) * filt)
    return float(lp_norm_nodal(heated.to_nodal(), p, g) / nb)


def random_annulus_field(grid: Grid, j: int, rng: np.random.Generator
                         ) -> SpectralField:
    """Random real field with spectrum inside the block-j annulus."""
    lo, hi = (0.0, _CHI_ZERO) if j == -1 else (_CHI_ONE * 2.0**j,
                                               2.0 * _CHI_ZERO * 2.0**j)
    mask = (grid.kmag >= lo) & (grid.kmag <= hi)
    if j == -1:
        mask[0, 0] = False
    if not mask.any():
        raise ValueError(f"block {j} annulus holds no grid modes")
    noise = SpectralField.from_nodal(grid, rng.standard_normal((grid.n, grid.n)))
    return SpectralField(grid, noise.coeffs * mask)
