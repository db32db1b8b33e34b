"""Variable-density incompressible flow with density-dependent viscosity.

The momentum balance solved here is

    rho (u_t + u.grad u) = div( mu(rho) M(u) ) - grad Pi,   div u = 0,

with M(u) = grad u + (grad u)^T.  The viscous flux is split as
mu0 Lap u + div((mu(rho) - mu0) M(u)): the constant part is diagonal in
Fourier space and the time stepper integrates it exactly, while the
perturbation is assembled pseudo-spectrally with dealiased products and
stepped explicitly.

The pressure gradient is pinned by div u_t = 0.  Because the density is
inhomogeneous the projection is density-weighted; it is resolved by a
Richardson iteration preconditioned with the constant-density Leray
projector,

    grad Pi  <-  Q[ F - rho * P((F - grad Pi)/rho) ],

whose contraction factor scales with the density contrast.  The fixed
point satisfies u_t = P((F - grad Pi)/rho) with div u_t = 0 exactly.

Time stepping is Lawson-type RK2 (exact integrating factor exp(mu0 dt Lap)
around explicit Heun), second order on smooth solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .advection import CFLError, advect_nodal
from .grid import Grid
from .spectral import DensityField, SpectralField, VelocityField
from .viscosity import ViscosityLaw

__all__ = [
    "FlowState",
    "ForceDecomposition",
    "ProjectionError",
    "Trajectory",
    "momentum_rhs",
    "force_decomposition",
    "step",
    "run",
    "DIAGNOSTIC_COLUMNS",
]

DIAGNOSTIC_COLUMNS = ("t", "l2_u", "l2_grad_u", "l2_ut", "p_div",
                      "q_div_minus_gradpi", "min_rho", "max_rho", "energy")


class ProjectionError(RuntimeError):
    """Density-weighted projection iteration failed to contract."""


@dataclass
class FlowState:
    t: float
    u: VelocityField
    rho: DensityField

    def __post_init__(self) -> None:
        if self.u.grid != self.rho.grid:
            raise ValueError("velocity and density live on different grids")
        self.grid = self.u.grid


@dataclass
class ForceDecomposition:
    """Pieces of the momentum balance at one instant.

    `p_div` and `q_div` are the solenoidal and gradient parts of
    div(mu(rho) M(u)); `q_div` minus `grad_pi` is the effective gradient
    forcing.  `residual` measures how well P div(mu M) = P(rho u_t +
    rho u.grad u) closes, relative to the size of the terms.
    """

    u_t: VelocityField
    grad_pi: tuple[SpectralField, SpectralField]
    p_div: tuple[SpectralField, SpectralField]
    q_div: tuple[SpectralField, SpectralField]
    residual: float
    iterations: int


# ----------------------------------------------------------------------
# low-level spectral helpers (raw coefficient arrays)
# ----------------------------------------------------------------------

def _ifft(grid: Grid, c: np.ndarray) -> np.ndarray:
    return np.real(np.fft.ifft2(c)) * grid.n**2

def _fft(grid: Grid, nodal: np.ndarray) -> np.ndarray:
    return np.fft.fft2(nodal) * (grid.dealias_mask / grid.n**2)

def _leray_pair(grid: Grid, c1: np.ndarray, c2: np.ndarray):
    kdot = (grid.kx * c1 + grid.ky * c2) / grid.k2_safe
    kdot[0, 0] = 0.0
    return c1 - grid.kx * kdot, c2 - grid.ky * kdot

def _grad_part(grid: Grid, c1: np.ndarray, c2: np.ndarray):
    kdot = (grid.kx * c1 + grid.ky * c2) / grid.k2_safe
    kdot[0, 0] = 0.0
    return grid.kx * kdot, grid.ky * kdot

def _pair_l2(grid: Grid, c1: np.ndarray, c2: np.ndarray) -> float:
    return float(grid.l * np.sqrt(np.sum(np.abs(c1)**2 + np.abs(c2)**2)))


class _Assembly:
    """Everything momentum_rhs computes at one state, kept for diagnostics."""

    __slots__ = ("grid", "u_t", "grad_pi", "visc1", "visc2", "adv1", "adv2",
                 "grad_nodal", "mu_nodal", "iterations", "residual")


def _assemble(grid: Grid, c1: np.ndarray, c2: np.ndarray, rho: np.ndarray,
              law: ViscosityLaw, tol: float, max_iter: int,
              gradpi_guess=None) -> _Assembly:
    mu0 = law.mu0
    u1n = _ifft(grid, c1)
    u2n = _ifft(grid, c2)
    d11 = _ifft(grid, 1j * grid.kx_diff * c1)   # du1/dx
    d12 = _ifft(grid, 1j * grid.ky_diff * c1)   # du1/dy
    d21 = _ifft(grid, 1j * grid.kx_diff * c2)
    d22 = _ifft(grid, 1j * grid.ky_diff * c2)

    # rho * (u . grad u), dealiased after each product
    a1 = _ifft(grid, _fft(grid, u1n * d11 + u2n * d12))
    a2 = _ifft(grid, _fft(grid, u1n * d21 + u2n * d22))
    ra1 = _fft(grid, rho * a1)
    ra2 = _fft(grid, rho * a2)

    # div(mu M(u)) = mu0 Lap u + div((mu - mu0) M(u))
    mu_n = law(rho)
    pert = mu_n - mu0
    m11 = _fft(grid, pert * (2.0 * d11))
    m12 = _fft(grid, pert * (d12 + d21))
    m22 = _fft(grid, pert * (2.0 * d22))
    visc1 = -mu0 * grid.k2 * c1 + 1j * (grid.kx_diff * m11 + grid.ky_diff * m12)
    visc2 = -mu0 * grid.k2 * c2 + 1j * (grid.kx_diff * m12 + grid.ky_diff * m22)

    f1 = visc1 - ra1
    f2 = visc2 - ra2
    fscale = max(_pair_l2(grid, f1, f2), 1e-300)

    if gradpi_guess is None:
        gp1, gp2 = _grad_part(grid, f1, f2)
    else:
        gp1, gp2 = gradpi_guess[0].copy(), gradpi_guess[1].copy()

    inv_rho = 1.0 / rho
    ut1 = ut2 = None
    it = 0
    for it in range(1, max_iter + 1):
        w1 = _ifft(grid, f1 - gp1) * inv_rho
        w2 = _ifft(grid, f2 - gp2) * inv_rho
        ut1, ut2 = _leray_pair(grid, _fft(grid, w1), _fft(grid, w2))
        r1 = _fft(grid, rho * _ifft(grid, ut1))
        r2 = _fft(grid, rho * _ifft(grid, ut2))
        new1, new2 = _grad_part(grid, f1 - r1, f2 - r2)
        delta = _pair_l2(grid, new1 - gp1, new2 - gp2)
        gp1, gp2 = new1, new2
        if delta <= tol * fscale:
            break
    else:
        raise ProjectionError(
            f"projection iteration did not reach tol={tol:.1e} within "
            f"{max_iter} iterations (last increment {delta / fscale:.3e} "
            f"relative); the density contrast is too large for the "
            f"constant-density preconditioner"
        )
    # one more application so u_t matches the converged gradient exactly
    w1 = _ifft(grid, f1 - gp1) * inv_rho
    w2 = _ifft(grid, f2 - gp2) * inv_rho
    ut1, ut2 = _leray_pair(grid, _fft(grid, w1), _fft(grid, w2))

    # closure residual: P div(mu M) vs P(rho u_t + rho u.grad u)
    rut1 = _fft(grid, rho * _ifft(grid, ut1))
    rut2 = _fft(grid, rho * _ifft(grid, ut2))
    lhs1, lhs2 = _leray_pair(grid, visc1, visc2)
    rhs1, rhs2 = _leray_pair(grid, rut1 + ra1, rut2 + ra2)
    scale = max(_pair_l2(grid, lhs1, lhs2), _pair_l2(grid, rhs1, rhs2), 1e-300)
    residual = _pair_l2(grid, lhs1 - rhs1, lhs2 - rhs2) / scale

    out = _Assembly()
    out.grid = grid
    out.u_t = (ut1, ut2)
    out.grad_pi = (gp1, gp2)
    out.visc1 = visc1
    out.visc2 = visc2
    out.adv1 = ra1
    out.adv2 = ra2
    out.grad_nodal = (d11, d12, d21, d22)
    out.mu_nodal = mu_n
    out.iterations = it
    out.residual = residual
    return out


# ----------------------------------------------------------------------
# public single-state operations
# ----------------------------------------------------------------------

def momentum_rhs(state: FlowState, law: ViscosityLaw, tol: float = 1e-10,
                 max_iter: int = 50) -> VelocityField:
    """Solenoidal velocity tendency u_t at the given state."""
    asm = _assemble(state.grid, state.u.u1.coeffs, state.u.u2.coeffs,
                    state.rho.values, law, tol, max_iter)
    g = state.grid
    return VelocityField(SpectralField(g, asm.u_t[0]),
                         SpectralField(g, asm.u_t[1]), trusted=True)


def force_decomposition(state: FlowState, law: ViscosityLaw, tol: float = 1e-10,
                        max_iter: int = 50) -> ForceDecomposition:
    g = state.grid
    asm = _assemble(g, state.u.u1.coeffs, state.u.u2.coeffs,
                    state.rho.values, law, tol, max_iter)
    p1, p2 = _leray_pair(g, asm.visc1, asm.visc2)
    q1, q2 = _grad_part(g, asm.visc1, asm.visc2)
    return ForceDecomposition(
        u_t=VelocityField(SpectralField(g, asm.u_t[0]),
                          SpectralField(g, asm.u_t[1]), trusted=True),
        grad_pi=(SpectralField(g, asm.grad_pi[0]), SpectralField(g, asm.grad_pi[1])),
        p_div=(SpectralField(g, p1), SpectralField(g, p2)),
        q_div=(SpectralField(g, q1), SpectralField(g, q2)),
        residual=asm.residual,
        iterations=asm.iterations,
    )


# ----------------------------------------------------------------------
# time stepping
# ----------------------------------------------------------------------

@dataclass
class StepOptions:
    dt: float
    scheme: str = "spectral"          # density transport scheme
    cfl_max: float = 0.9
    projection_tol: float = 1e-10
    projection_max_iter: int = 50
    overshoot_delta: float | None = None  # density excursion budget


def _density_tendency(grid: Grid, rho: np.ndarray, u1n, u2n) -> np.ndarray:
    c = np.fft.fft2(rho)
    drx = np.real(np.fft.ifft2(1j * grid.kx_diff * c))
    dry = np.real(np.fft.ifft2(1j * grid.ky_diff * c))
    tend = -(u1n * drx + u2n * dry)
    return np.real(np.fft.ifft2(np.fft.fft2(tend) * grid.dealias_mask))


class _Stepper:
    """Holds the integrating factor and scratch config for repeated steps."""

    def __init__(self, grid: Grid, law: ViscosityLaw, opts: StepOptions):
        self.grid = grid
        self.law = law
        self.opts = opts
        self.efactor = np.exp(-law.mu0 * grid.k2 * opts.dt)
        self.gradpi_prev = None

    def advance(self, c1, c2, rho, collect=None):
        """One Lawson-RK2 step; optionally fills `collect` (a dict) with
        stage-1 diagnostics so a running simulation gets them for free."""
        g = self.grid
        dt = self.opts.dt
        E = self.efactor
        mu0k2 = self.law.mu0 * g.k2

        asm1 = _assemble(g, c1, c2, rho, self.law, self.opts.projection_tol,
                         self.opts.projection_max_iter, self.gradpi_prev)
        self.gradpi_prev = asm1.grad_pi
        n1a = asm1.u_t[0] + mu0k2 * c1
        n1b = asm1.u_t[1] + mu0k2 * c2

        u1n = _ifft(g, c1)
        u2n = _ifft(g, c2)
        umax = float(np.max(np.hypot(u1n, u2n)))
        cfl = umax * dt / g.dx
        if cfl > self.opts.cfl_max:
            raise CFLError(
                f"advective CFL {cfl:.3f} exceeds limit {self.opts.cfl_max:.3f} "
                f"(max|u| = {umax:.3e}, dt = {dt:.3e}, dx = {g.dx:.3e})"
            )

        if collect is not None:
            self._collect(collect, c1, c2, rho, asm1, u1n, u2n)

        p1 = E * (c1 + dt * n1a)
        p2 = E * (c2 + dt * n1b)

        if self.opts.scheme == "spectral":
            r1 = _density_tendency(g, rho, u1n, u2n)
            rho_mid = rho + dt * r1
            asm2 = _assemble(g, p1, p2, rho_mid, self.law,
                             self.opts.projection_tol,
                             self.opts.projection_max_iter, self.gradpi_prev)
            n2a = asm2.u_t[0] + mu0k2 * p1
            n2b = asm2.u_t[1] + mu0k2 * p2
            p1n = _ifft(g, p1)
            p2n = _ifft(g, p2)
            r2 = _density_tendency(g, rho_mid, p1n, p2n)
            rho_new = rho + 0.5 * dt * (r1 + r2)
        else:
            u_now = VelocityField(SpectralField(g, c1), SpectralField(g, c2),
                                  trusted=True)
            rho_mid = advect_nodal(rho, u_now, dt, scheme="semi_lagrangian",
                                   cfl_max=self.opts.cfl_max)
            asm2 = _assemble(g, p1, p2, rho_mid, self.law,
                             self.opts.projection_tol,
                             self.opts.projection_max_iter, self.gradpi_prev)
            n2a = asm2.u_t[0] + mu0k2 * p1
            n2b = asm2.u_t[1] + mu0k2 * p2
            u_half = VelocityField(SpectralField(g, 0.5 * (c1 + p1)),
                                   SpectralField(g, 0.5 * (c2 + p2)),
                                   trusted=True)
            rho_new = advect_nodal(rho, u_half, dt, scheme="semi_lagrangian",
                                   cfl_max=self.opts.cfl_max)

        c1_new = E * (c1 + 0.5 * dt * n1a) + 0.5 * dt * n2a
        c2_new = E * (c2 + 0.5 * dt * n1b) + 0.5 * dt * n2b
        return c1_new, c2_new, rho_new

    def _collect(self, out, c1, c2, rho, asm, u1n, u2n):
        g = self.grid
        ca = g.cell_area
        d11, d12, d21, d22 = asm.grad_nodal
        gradsq = d11**2 + d12**2 + d21**2 + d22**2
        p1, p2 = _leray_pair(g, asm.visc1, asm.visc2)
        q1, q2 = _grad_part(g, asm.visc1, asm.visc2)
        ut1n = _ifft(g, asm.u_t[0])
        ut2n = _ifft(g, asm.u_t[1])
        out["l2_u"] = _pair_l2(g, c1, c2)
        out["l2_grad_u"] = float(g.l * np.sqrt(
            np.sum(g.k2 * (np.abs(c1)**2 + np.abs(c2)**2))))
        out["l2_ut"] = _pair_l2(g, asm.u_t[0], asm.u_t[1])
        out["p_div"] = _pair_l2(g, p1, p2)
        out["q_div_minus_gradpi"] = _pair_l2(g, q1 - asm.grad_pi[0],
                                             q2 - asm.grad_pi[1])
        out["min_rho"] = float(np.min(rho))
        out["max_rho"] = float(np.max(rho))
        out["energy"] = float(np.sum(rho * (u1n**2 + u2n**2)) * ca)
        out["mu_grad_u_sq"] = float(np.sum(asm.mu_nodal * gradsq) * ca)
        out["rho_ut_sq"] = float(np.sum(rho * (ut1n**2 + ut2n**2)) * ca)
        out["residual"] = asm.residual
        out["iterations"] = asm.iterations


def step(state: FlowState, law: ViscosityLaw, dt: float, **kw) -> FlowState:
    """Advance one step; see `run` for whole-trajectory integration."""
    opts = StepOptions(dt=dt, **kw)
    stepper = _Stepper(state.grid, law, opts)
    c1, c2, rho = stepper.advance(state.u.u1.coeffs, state.u.u2.coeffs,
                                  state.rho.values)
    g = state.grid
    u = VelocityField(SpectralField(g, c1), SpectralField(g, c2), trusted=True)
    return FlowState(t=state.t + dt,
                     u=u,
                     rho=DensityField(g, rho, require_positive=state.rho.require_positive))


# ----------------------------------------------------------------------
# trajectories
# ----------------------------------------------------------------------

EXTRA_COLUMNS = ("mu_grad_u_sq", "rho_ut_sq", "residual", "iterations")


@dataclass
class Trajectory:
    """Per-step diagnostics plus periodic full snapshots of one run."""

    grid: Grid
    law: ViscosityLaw
    dt: float
    diagnostics: dict[str, np.ndarray]
    snapshot_times: list[float] = field(default_factory=list)
    snapshots: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.diagnostics["t"]

    def column(self, name: str) -> np.ndarray:
        return self.diagnostics[name]

    def snapshot_state(self, i: int) -> FlowState:
        c1, c2, rho = self.snapshots[i]
        u = VelocityField(SpectralField(self.grid, c1.copy()),
                          SpectralField(self.grid, c2.copy()), trusted=True)
        return FlowState(t=self.snapshot_times[i], u=u,
                         rho=DensityField(self.grid, rho.copy(),
                                          require_positive=False))

    def diagnostics_rows(self):
        cols = [self.diagnostics[c] for c in DIAGNOSTIC_COLUMNS]
        return zip(*cols)


def run(u0: VelocityField, rho0: DensityField, law: ViscosityLaw, dt: float,
        t_final: float, snapshot_every: int = 0, scheme: str = "spectral",
        cfl_max: float = 0.9, projection_tol: float = 1e-10,
        projection_max_iter: int = 50, overshoot_delta: float | None = None,
        ) -> Trajectory:
    """Integrate from t = 0 to t_final, sampling diagnostics every step.

    `snapshot_every` > 0 stores full spectral snapshots every that many
    steps (plus the initial and final states).  The density excursion
    budget defaults to 1e-3 of the initial range.
    """
    g = u0.grid
    if rho0.grid != g:
        raise ValueError("velocity and density live on different grids")
    law.validate_range(*rho0.bounds())
    n_steps = max(1, int(round(t_final / dt)))
    dt_eff = t_final / n_steps

    rho_lo0, rho_hi0 = rho0.bounds()
    if overshoot_delta is None:
        overshoot_delta = 1e-3 * max(rho_hi0 - rho_lo0, 1e-12)

    opts = StepOptions(dt=dt_eff, scheme=scheme, cfl_max=cfl_max,
                       projection_tol=projection_tol,
                       projection_max_iter=projection_max_iter,
                       overshoot_delta=overshoot_delta)
    stepper = _Stepper(g, law, opts)

    c1 = u0.u1.coeffs.copy()
    c2 = u0.u2.coeffs.copy()
    rho = rho0.values.copy()

    rows: dict[str, list[float]] = {c: [] for c in DIAGNOSTIC_COLUMNS + EXTRA_COLUMNS}
    snap_t: list[float] = []
    snaps: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def take_snapshot(t):
        snap_t.append(t)
        snaps.append((c1.copy(), c2.copy(), rho.copy()))

    for m in range(n_steps + 1):
        t = m * dt_eff
        sample: dict[str, float] = {}
        if m < n_steps:
            new1, new2, new_rho = stepper.advance(c1, c2, rho, collect=sample)
        else:
            # final state: assemble once more for the closing diagnostics row
            asm = _assemble(g, c1, c2, rho, law, projection_tol,
                            projection_max_iter, stepper.gradpi_prev)
            stepper._collect(sample, c1, c2, rho, asm,
                             _ifft(g, c1), _ifft(g, c2))
        sample["t"] = t
        for k in rows:
            rows[k].append(sample[k])
        if snapshot_every > 0 and (m % snapshot_every == 0 or m == n_steps):
            take_snapshot(t)
        if m < n_steps:
            c1, c2, rho = new1, new2, new_rho
            lo, hi = float(np.min(rho)), float(np.max(rho))
            if lo < rho_lo0 - overshoot_delta or hi > rho_hi0 + overshoot_delta:
                raise RuntimeError(
                    f"density left its admissible band at t={t + dt_eff:.4g}: "
                    f"[{lo:.6f}, {hi:.6f}] vs initial [{rho_lo0:.6f}, {rho_hi0:.6f}] "
                    f"with budget {overshoot_delta:.2e}"
                )

    diag = {k: np.asarray(v, dtype=np.float64) for k, v in rows.items()}
    return Trajectory(grid=g, law=law, dt=dt_eff, diagnostics=diag,
                      snapshot_times=snap_t, snapshots=snaps,
                      meta={"scheme": scheme, "n_steps": n_steps,
                            "cfl_max": cfl_max})
