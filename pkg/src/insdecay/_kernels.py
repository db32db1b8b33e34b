"""Hot interpolation kernels for semi-Lagrangian transport.

Two implementations of each kernel: a numba-compiled loop and a vectorized
numpy fallback.  The numba path is used when the package can import numba
and the environment variable INSDECAY_DISABLE_NUMBA is unset or "0"; both
paths produce identical values to roundoff and `benchmarks/bench_kernels.py`
times them against each other.

Everything FFT-bound stays in plain numpy elsewhere in the package; only
these gather/stencil loops benefit from compilation.

Coordinates are fractional grid indices (point p sits at field[px, py] with
periodic wrap), which keeps the kernels independent of the box size.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "bilinear_interp",
    "monotone_cubic_interp",
]

_disable = os.environ.get("INSDECAY_DISABLE_NUMBA", "0") not in ("0", "")

try:
    if _disable:
        raise ImportError("numba disabled via INSDECAY_DISABLE_NUMBA")
    from numba import njit, prange

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


# ----------------------------------------------------------------------
# numpy reference path
# ----------------------------------------------------------------------

def _bilinear_numpy(field: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    n = field.shape[0]
    i0 = np.floor(px).astype(np.int64)
    j0 = np.floor(py).astype(np.int64)
    sx = px - i0
    sy = py - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    f00 = field[i0, j0]
    f01 = field[i0, j1]
    f10 = field[i1, j0]
    f11 = field[i1, j1]
    return ((1 - sx) * ((1 - sy) * f00 + sy * f01)
            + sx * ((1 - sy) * f10 + sy * f11))


def _cubic_weights(s: np.ndarray) -> tuple[np.ndarray, ...]:
    # Catmull-Rom
    s2 = s * s
    s3 = s2 * s
    return (-0.5 * s + s2 - 0.5 * s3,
            1.0 - 2.5 * s2 + 1.5 * s3,
            0.5 * s + 2.0 * s2 - 1.5 * s3,
            -0.5 * s2 + 0.5 * s3)


def _monotone_cubic_numpy(field: np.ndarray, px: np.ndarray, py: np.ndarray
                          ) -> np.ndarray:
    n = field.shape[0]
    i0 = np.floor(px).astype(np.int64)
    j0 = np.floor(py).astype(np.int64)
    sx = px - i0
    sy = py - j0
    i0 %= n
    j0 %= n
    wx = _cubic_weights(sx)
    wy = _cubic_weights(sy)
    val = np.zeros_like(px)
    cols = [(j0 + dj) % n for dj in (-1, 0, 1, 2)]
    for di, wxi in zip((-1, 0, 1, 2), wx):
        row = (i0 + di) % n
        acc = np.zeros_like(px)
        for col, wyj in zip(cols, wy):
            acc += wyj * field[row, col]
        val += wxi * acc
    # clip to the bounding bilinear cell: keeps the discrete maximum principle
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    c00 = field[i0, j0]
    c01 = field[i0, j1]
    c10 = field[i1, j0]
    c11 = field[i1, j1]
    lo = np.minimum(np.minimum(c00, c01), np.minimum(c10, c11))
    hi = np.maximum(np.maximum(c00, c01), np.maximum(c10, c11))
    return np.clip(val, lo, hi)


# ----------------------------------------------------------------------
# numba path
# ----------------------------------------------------------------------

if NUMBA_ENABLED:

    @njit(parallel=True, fastmath=False, cache=True)
    def _bilinear_numba(field, px, py):  # pragma: no cover - compiled
        n = field.shape[0]
        m = px.shape[0]
        out = np.empty((m, px.shape[1]))
        for a in prange(m):
            for b in range(px.shape[1]):
                x = px[a, b]
                y = py[a, b]
                i0f = np.floor(x)
                j0f = np.floor(y)
                sx = x - i0f
                sy = y - j0f
                i0 = int(i0f) % n
                j0 = int(j0f) % n
                i1 = (i0 + 1) % n
                j1 = (j0 + 1) % n
                out[a, b] = ((1 - sx) * ((1 - sy) * field[i0, j0] + sy * field[i0, j1])
                             + sx * ((1 - sy) * field[i1, j0] + sy * field[i1, j1]))
        return out

    @njit(parallel=True, fastmath=False, cache=True)
    def _monotone_cubic_numba(field, px, py):  # pragma: no cover - compiled
        n = field.shape[0]
        m = px.shape[0]
        out = np.empty((m, px.shape[1]))
        for a in prange(m):
            for b in range(px.shape[1]):
                x = px[a, b]
                y = py[a, b]
                i0f = np.floor(x)
                j0f = np.floor(y)
                sx = x - i0f
                sy = y - j0f
                i0 = int(i0f) % n
                j0 = int(j0f) % n

                sx2 = sx * sx
                sx3 = sx2 * sx
                wx0 = -0.5 * sx + sx2 - 0.5 * sx3
                wx1 = 1.0 - 2.5 * sx2 + 1.5 * sx3
                wx2 = 0.5 * sx + 2.0 * sx2 - 1.5 * sx3
                wx3 = -0.5 * sx2 + 0.5 * sx3
                sy2 = sy * sy
                sy3 = sy2 * sy
                wy0 = -0.5 * sy + sy2 - 0.5 * sy3
                wy1 = 1.0 - 2.5 * sy2 + 1.5 * sy3
                wy2 = 0.5 * sy + 2.0 * sy2 - 1.5 * sy3
                wy3 = -0.5 * sy2 + 0.5 * sy3

                im = (i0 - 1) % n
                i1 = (i0 + 1) % n
                i2 = (i0 + 2) % n
                jm = (j0 - 1) % n
                j1 = (j0 + 1) % n
                j2 = (j0 + 2) % n

                val = wx0 * (wy0 * field[im, jm] + wy1 * field[im, j0]
                             + wy2 * field[im, j1] + wy3 * field[im, j2])
                val += wx1 * (wy0 * field[i0, jm] + wy1 * field[i0, j0]
                              + wy2 * field[i0, j1] + wy3 * field[i0, j2])
                val += wx2 * (wy0 * field[i1, jm] + wy1 * field[i1, j0]
                              + wy2 * field[i1, j1] + wy3 * field[i1, j2])
                val += wx3 * (wy0 * field[i2, jm] + wy1 * field[i2, j0]
                              + wy2 * field[i2, j1] + wy3 * field[i2, j2])

                c00 = field[i0, j0]
                c01 = field[i0, j1]
                c10 = field[i1, j0]
                c11 = field[i1, j1]
                lo = min(min(c00, c01), min(c10, c11))
                hi = max(max(c00, c01), max(c10, c11))
                if val < lo:
                    val = lo
                elif val > hi:
                    val = hi
                out[a, b] = val
        return out


def bilinear_interp(field: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Periodic bilinear interpolation at fractional indices (px, py)."""
    field = np.ascontiguousarray(field, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if NUMBA_ENABLED:
        return _bilinear_numba(field, px, py)
    return _bilinear_numpy(field, px, py)


def monotone_cubic_interp(field: np.ndarray, px: np.ndarray, py: np.ndarray
                          ) -> np.ndarray:
    """Catmull-Rom bicubic clipped to the surrounding cell extremes.

    The clip confines every interpolated value to [local min, local max],
    so transported extremes never leave the initial range.
    """
    field = np.ascontiguousarray(field, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if NUMBA_ENABLED:
        return _monotone_cubic_numba(field, px, py)
    return _monotone_cubic_numpy(field, px, py)
