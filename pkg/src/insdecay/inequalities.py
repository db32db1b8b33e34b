"""Gronwall bounds and the logarithmic calculus integrals.

Three integral families recur in the decay bootstrap:

    case 1:  I(t) = int_0^t (s+e)^-1 ln^-m(s+e) ds          (m > 1)
             closed form (1 - ln^(1-m)(t+e))/(m-1), so I(inf) = 1/(m-1);
             at m = 2 the limit is exactly 1.
    case 2:  I(t) = int_0^t (s+e)^(-1-beta) ln^m(s+e) ds <= gamma_m beta^-(m+1)
    case 3:  I(t) = int_0^t (s+e)^-alpha ln^-m(s+e) ds
                  <= gamma_{m,alpha} (t+e)^(1-alpha) ln^-m(t+e)   (0 <= alpha < 1)

The gamma constants are not universal closed forms; they were fitted once
by sweeping the documented parameter grids (see `fit_gamma2`/`fit_gamma3`
and the sweep constants below), given 1e-6 headroom, and frozen into
``data/gamma_constants.txt``.  Requests off the frozen grid fall back to
an on-the-fly fit.  Run ``python -m insdecay.inequalities`` to regenerate
the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

__all__ = [
    "gronwall_bound",
    "calculus_integral",
    "IntegralResult",
    "fit_gamma2",
    "fit_gamma3",
    "load_gamma_constants",
    "GAMMA2_M_GRID",
    "GAMMA3_GRID",
]

_E = math.e

# frozen sweep grids; regenerating the data file walks exactly these
GAMMA2_M_GRID = (0.5, 1.0, 1.5, 2.0, 3.0)
GAMMA2_BETA_SWEEP = tuple(float(b) for b in np.geomspace(0.05, 4.0, 25))
GAMMA3_GRID = ((0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (2.0, 0.0),
               (0.0, 0.25), (0.5, 0.25), (1.0, 0.25), (2.0, 0.25),
               (0.0, 0.5), (0.5, 0.5), (1.0, 0.5), (2.0, 0.5),
               (0.0, 0.75), (0.5, 0.75), (1.0, 0.75), (2.0, 0.75))
_T_SWEEP = tuple(float(t) for t in np.geomspace(1.0, 1e6, 61))
_HEADROOM = 1.0 + 1e-6


# ----------------------------------------------------------------------
# Gronwall
# ----------------------------------------------------------------------

def gronwall_bound(t, g, h) -> np.ndarray:
    """Pointwise bound g(t) + int_0^t h g exp(int_s^t h) ds on samples.

    Any f satisfying f(t) <= g(t) + int_0^t h f ds with h >= 0 stays below
    this curve.  Quadrature is composite trapezoid on the supplied grid.
    """
    t = np.asarray(t, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if not (t.shape == g.shape == h.shape) or t.ndim != 1:
        raise ValueError("t, g, h must be one-dimensional arrays of equal length")
    if t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing with >= 2 points")
    if np.any(h < 0):
        raise ValueError("Gronwall hypothesis needs h >= 0")
    H = np.concatenate([[0.0], cumulative_trapezoid(h, t)])
    # g + e^H * int_0^t h g e^-H; e^-H <= 1 so no overflow on this side
    inner = np.concatenate([[0.0], cumulative_trapezoid(h * g * np.exp(-H), t)])
    return g + np.exp(H) * inner


# ----------------------------------------------------------------------
# calculus integrals
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralResult:
    value: float
    bound: float
    case: int
    params: dict

    @property
    def satisfied(self) -> bool:
        # quadrature slack only; the analytic inequalities are not tight here
        return self.value <= self.bound * (1.0 + 1e-9) + 1e-12


def _integrand(case: int, m: float, alpha: float, beta: float):
    if case == 1:
        return lambda s: 1.0 / ((s + _E) * math.log(s + _E) ** m)
    if case == 2:
        return lambda s: math.log(s + _E) ** m / (s + _E) ** (1.0 + beta)
    return lambda s: 1.0 / ((s + _E) ** alpha * math.log(s + _E) ** m)


def _quad_value(case: int, m: float, alpha: float, beta: float, t: float) -> float:
    fn = _integrand(case, m, alpha, beta)
    val, _ = quad(fn, 0.0, t, limit=200)
    return float(val)


def _quad_case2(m: float, beta: float, t: float) -> float:
    # substitute y = ln(s+e): integrand y^m exp(-beta y) on [1, ln(t+e)],
    # which adaptive quadrature handles cleanly even for slow tails
    upper = np.inf if math.isinf(t) else math.log(t + _E)
    val, _ = quad(lambda y: y**m * math.exp(-beta * y), 1.0, upper, limit=400)
    return float(val)


def calculus_integral(case: int, t: float, m: float = 2.0, alpha: float = 0.0,
                      beta: float = 1.0) -> IntegralResult:
    """Evaluate one ladder integral by adaptive quadrature and pair it with
    its analytic bound.  t = inf is allowed for cases 1 and 2."""
    if case not in (1, 2, 3):
        raise ValueError(f"case must be 1, 2 or 3, got {case}")
    if case == 1:
        if m <= 1.0:
            raise ValueError(f"case 1 needs m > 1, got m={m}")
        bound = 1.0 / (m - 1.0)
        # substitute y = ln(s+e); the raw integrand decays too slowly at
        # infinity for reliable adaptive quadrature
        upper = np.inf if math.isinf(t) else math.log(t + _E)
        val, _ = quad(lambda y: y**-m, 1.0, upper, limit=400)
        return IntegralResult(float(val), bound, 1, {"m": m, "t": t})
    if case == 2:
        if m < 0 or beta <= 0:
            raise ValueError(f"case 2 needs m >= 0 and beta > 0, got m={m}, beta={beta}")
        gamma = lookup_gamma2(m)
        bound = gamma * beta ** (-(m + 1.0))
        return IntegralResult(_quad_case2(m, beta, t), bound, 2,
                              {"m": m, "beta": beta, "t": t})
    if m < 0 or not 0.0 <= alpha < 1.0:
        raise ValueError(f"case 3 needs m >= 0 and 0 <= alpha < 1, got m={m}, alpha={alpha}")
    if math.isinf(t):
        raise ValueError("case 3 grows without bound; t must be finite")
    gamma = lookup_gamma3(m, alpha)
    bound = gamma * (t + _E) ** (1.0 - alpha) / math.log(t + _E) ** m
    return IntegralResult(_quad_value(3, m, alpha, beta, t), bound, 3,
                          {"m": m, "alpha": alpha, "t": t})


# ----------------------------------------------------------------------
# fitted constants
# ----------------------------------------------------------------------

def fit_gamma2(m: float) -> float:
    """sup over the beta sweep of I(inf; m, beta) * beta^(m+1)."""
    worst = 0.0
    for beta in GAMMA2_BETA_SWEEP:
        worst = max(worst, _quad_case2(m, beta, np.inf) * beta ** (m + 1.0))
    return worst * _HEADROOM


def fit_gamma3(m: float, alpha: float) -> float:
    """sup over the t sweep of I(t) / ((t+e)^(1-alpha) ln^-m(t+e))."""
    worst = 0.0
    for t in _T_SWEEP:
        val = _quad_value(3, m, alpha, 0.0, t)
        envelope = (t + _E) ** (1.0 - alpha) / math.log(t + _E) ** m
        worst = max(worst, val / envelope)
    return worst * _HEADROOM


def _format_constants(lines: dict[str, float]) -> str:
    out = ["# fitted gamma constants for the ladder integrals",
           "# regenerate with: python -m insdecay.inequalities"]
    for key in sorted(lines):
        out.append(f"{key} = {lines[key]!r}")
    return "\n".join(out) + "\n"


def _fit_all() -> dict[str, float]:
    vals: dict[str, float] = {}
    for m in GAMMA2_M_GRID:
        vals[f"gamma2_m{m:g}"] = fit_gamma2(m)
    for m, alpha in GAMMA3_GRID:
        vals[f"gamma3_m{m:g}_a{alpha:g}"] = fit_gamma3(m, alpha)
    return vals


_gamma_cache: dict[str, float] | None = None


def load_gamma_constants() -> dict[str, float]:
    global _gamma_cache
    if _gamma_cache is None:
        text = (resources.files("insdecay") / "data" / "gamma_constants.txt").read_text()
        vals: dict[str, float] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, raw = line.partition("=")
            vals[key.strip()] = float(raw.strip())
        _gamma_cache = vals
    return _gamma_cache


def lookup_gamma2(m: float) -> float:
    frozen = load_gamma_constants().get(f"gamma2_m{m:g}")
    return frozen if frozen is not None else fit_gamma2(m)


def lookup_gamma3(m: float, alpha: float) -> float:
    frozen = load_gamma_constants().get(f"gamma3_m{m:g}_a{alpha:g}")
    return frozen if frozen is not None else fit_gamma3(m, alpha)


if __name__ == "__main__":  # regenerate the frozen table
    print(_format_constants(_fit_all()), end="")
