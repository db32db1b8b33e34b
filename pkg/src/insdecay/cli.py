"""Command-line entry point.

Subcommands: simulate, decay_fit, besov_norm, transport_reg,
check_smallness, verify_inequalities.  Batch mode runs a manifest of
independent jobs on a bounded worker pool.  Exit status is nonzero on any
assertion failure so the tool composes with shell pipelines and CI.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .besov import (BesovSpec, besov_norm, heat_block_decay,
                    random_annulus_field, verify_bernstein)
from .config import ConfigError, SimConfig
from .decay import (fit_decay_report, fourier_splitting_check, heat_trajectory,
                    energy_ledger)
from .grid import Grid
from .inequalities import (GAMMA2_BETA_SWEEP, GAMMA2_M_GRID, GAMMA3_GRID,
                           _T_SWEEP, calculus_integral, gronwall_bound)
from .initial_data import InitialDataSpec, gen_initial_density, gen_initial_velocity, make_rng
from .output import (default_output_root, read_diagnostics_csv, read_snapshot,
                     write_diagnostics_csv, write_report, write_snapshot,
                     write_two_column)
from .smallness import check_smallness
from .solver import run as run_solver
from .spectral import SpectralField, VelocityField
from .transport import (product_law_check, product_law_ensemble,
                        random_multiscale_field, rotation_velocity,
                        shear_velocity, transport_block_experiment)

__all__ = ["main"]


# ----------------------------------------------------------------------
# shared plumbing
# ----------------------------------------------------------------------

def _load_config(args) -> SimConfig:
    cfg = SimConfig.from_file(args.config) if args.config else SimConfig()
    if args.set:
        cfg = cfg.with_overrides(args.set)
    return cfg


def _run_dir(cfg: SimConfig, name: str | None, root: str | None) -> Path:
    if cfg.run_output_dir:
        return Path(cfg.run_output_dir)
    base = Path(root) if root else default_output_root()
    return base / (name or f"run_seed{cfg.run_seed}")


def _build_initial(cfg: SimConfig):
    """(u0, rho0, norms dict) from the resolved config."""
    grid = cfg.make_grid()
    if cfg.initial_data_amplitude == 0.0:
        zero = SpectralField(grid, grid.zeros_coeffs())
        u0 = VelocityField(zero, zero, trusted=True)
        norms = {"l2": 0.0, "h1": 0.0}
    else:
        u0, norms = gen_initial_velocity(cfg.make_initial_spec(), grid)
    rho0 = gen_initial_density(grid, cfg.physics_density_contrast,
                               k_band=cfg.density_k_band_abs(),
                               seed=cfg.run_seed)
    return u0, rho0, norms


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def _simulate_one(cfg: SimConfig, outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config_resolved.ini").write_text(cfg.to_text())

    u0, rho0, norms = _build_initial(cfg)
    law = cfg.make_law()
    traj = run_solver(u0, rho0, law, cfg.time_dt, cfg.time_t_final,
                      snapshot_every=cfg.time_snapshot_cadence,
                      scheme=cfg.run_scheme, cfl_max=cfg.run_cfl_max,
                      projection_tol=cfg.run_projection_tol,
                      projection_max_iter=cfg.run_projection_max_iter,
                      overshoot_delta=cfg.run_overshoot_delta or None)

    write_diagnostics_csv(outdir / "diagnostics.csv", traj)
    write_two_column(outdir / "decay_u_sq.txt", traj.times,
                     traj.column("l2_u") ** 2)
    write_two_column(outdir / "decay_grad_u_sq.txt", traj.times,
                     traj.column("l2_grad_u") ** 2)

    for weight in cfg.weight_list():
        ledger = energy_ledger(traj, weight, p=cfg.physics_p,
                               eps=cfg.physics_eps)
        ledger.to_csv(outdir / f"ledger_{weight}.csv")

    snapdir = outdir / "snapshots"
    if traj.snapshots:
        snapdir.mkdir(exist_ok=True)
        for i, t in enumerate(traj.snapshot_times):
            write_snapshot(snapdir / f"snap_{i:06d}.bin", traj.snapshot_state(i))

    entries = {
        "run.steps": len(traj.times) - 1,
        "initial.l2": norms.get("l2", 0.0),
        "initial.h1": norms.get("h1", 0.0),
        "density.min_final": float(traj.column("min_rho")[-1]),
        "density.max_final": float(traj.column("max_rho")[-1]),
        "energy.initial": float(traj.column("energy")[0]),
        "energy.final": float(traj.column("energy")[-1]),
    }
    entries.update(_fit_entries(cfg, traj.times, traj.column("l2_u"),
                                traj.column("l2_grad_u")))
    write_report(outdir / "report.txt", entries, cfg.to_text())
    return 0


def _fit_entries(cfg: SimConfig, t, l2_u, l2_grad) -> dict:
    try:
        rep = fit_decay_report(t, l2_u, l2_grad, p=cfg.physics_p,
                               mu0=cfg.physics_mu0, l=cfg.grid_l,
                               window=cfg.fit_window(),
                               k_c=cfg.initial_data_k_c)
    except ValueError as exc:
        return {"decay_fit": f"skipped ({exc})"}
    return rep.as_entries()


def _parse_manifest(path: Path):
    """Lines: <name> [config=<path>] [section.key=value ...]."""
    jobs = []
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        name, cfg_path, overrides = parts[0], None, []
        for tok in parts[1:]:
            if tok.startswith("config="):
                cfg_path = tok[len("config="):]
            else:
                overrides.append(tok)
        try:
            cfg = SimConfig.from_file(cfg_path) if cfg_path else SimConfig()
            cfg = cfg.with_overrides(overrides)
        except (ConfigError, OSError) as exc:
            raise ConfigError(f"{path}:{ln}: {exc}") from None
        jobs.append((name, cfg))
    if not jobs:
        raise ConfigError(f"{path}: manifest lists no runs")
    names = [n for n, _ in jobs]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: duplicate run names")
    return jobs


def _job(item):
    name, cfg, outdir = item
    code = _simulate_one(cfg, Path(outdir))
    return name, code


def cmd_simulate(args) -> int:
    if args.manifest:
        jobs = _parse_manifest(Path(args.manifest))
        items = [(name, cfg, _run_dir(cfg, name, args.output_root))
                 for name, cfg in jobs]
        workers = max(1, args.jobs)
        status = 0
        if workers == 1:
            results = map(_job, items)
        else:
            pool = concurrent.futures.ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_job, items)
        for name, code in results:
            print(f"{'ok' if code == 0 else 'FAIL'} {name}")
            status = max(status, code)
        if workers > 1:
            pool.shutdown()
        return status
    cfg = _load_config(args)
    outdir = _run_dir(cfg, args.name, args.output_root)
    code = _simulate_one(cfg, outdir)
    print(f"wrote {outdir}")
    return code


# ----------------------------------------------------------------------
# decay_fit
# ----------------------------------------------------------------------

def cmd_decay_fit(args) -> int:
    rundir = Path(args.run_dir)
    cfg_file = rundir / "config_resolved.ini"
    diag_file = rundir / "diagnostics.csv"
    for f in (cfg_file, diag_file):
        if not f.exists():
            print(f"missing run artifact: {f}", file=sys.stderr)
            return 2
    cfg = SimConfig.from_file(cfg_file)
    diag = read_diagnostics_csv(diag_file)
    window = tuple(args.window) if args.window else cfg.fit_window()
    if window is None:
        entries = _fit_entries(cfg, diag["t"], diag["l2_u"], diag["l2_grad_u"])
    else:
        entries = _fit_entries_window(cfg, diag, window)
    write_report(rundir / "decay_report.txt", entries, cfg.to_text())
    for k, v in entries.items():
        print(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
    return 0


def _fit_entries_window(cfg: SimConfig, diag, window) -> dict:
    try:
        rep = fit_decay_report(diag["t"], diag["l2_u"], diag["l2_grad_u"],
                               p=cfg.physics_p, mu0=cfg.physics_mu0,
                               l=cfg.grid_l, window=window)
    except ValueError as exc:
        return {"decay_fit": f"skipped ({exc})"}
    return rep.as_entries()


# ----------------------------------------------------------------------
# besov_norm
# ----------------------------------------------------------------------

def cmd_besov_norm(args) -> int:
    state = read_snapshot(args.field_file)
    if args.field == "u1":
        f = state.u.u1
    elif args.field == "u2":
        f = state.u.u2
    else:
        f = SpectralField.from_nodal(state.grid, state.rho.values)
    if args.log is not None:
        spec = BesovSpec.log(args.log)
        label = f"B^{args.log}ln_inf1"
    else:
        s, p, r = args.classical
        spec = BesovSpec.classical(s, math.inf if p == 0 else p,
                                   math.inf if r == 0 else r)
        label = f"B^{s}_{p or 'inf'},{r or 'inf'}"
    val = besov_norm(f, spec)
    print(f"{label}({args.field}) = {val!r}")
    return 0


# ----------------------------------------------------------------------
# transport_reg
# ----------------------------------------------------------------------

def cmd_transport_reg(args) -> int:
    cfg = _load_config(args)
    grid = cfg.make_grid()
    eta = cfg.harness_eta
    if args.velocity == "shear":
        u = shear_velocity(grid, amplitude=args.amplitude)
    elif args.velocity == "rotation":
        u = rotation_velocity(grid, omega=args.amplitude,
                              r_rigid=0.2 * grid.l, r_outer=0.4 * grid.l)
    else:
        u = _random_velocity(grid, cfg.run_seed, args.amplitude)
    rho0 = random_multiscale_field(grid, cfg.run_seed, k_top=grid.kcut * 0.5)
    rep = transport_block_experiment(rho0, u, eta, cfg.time_t_final,
                                     cfg.time_dt, scheme=cfg.run_scheme,
                                     cfl_max=cfg.run_cfl_max)
    outdir = _run_dir(cfg, args.name or "transport", args.output_root)
    outdir.mkdir(parents=True, exist_ok=True)
    rep.to_csv(outdir / "growth.csv")
    rep.matrix_to_csv(outdir / "blocks_final.csv")
    ceiling = eta + 1.0 + 0.3
    entries = {
        "eta": eta,
        "rho0_norm": rep.rho0_norm,
        "c_fit": rep.c_fit,
        "growth_degree": rep.growth_degree,
        "degree_ceiling": ceiling,
        "superposition_err_max": float(np.max(rep.superposition_err)),
    }
    write_report(outdir / "transport_report.txt", entries, cfg.to_text())
    ok = (math.isnan(rep.growth_degree) or rep.growth_degree <= ceiling)
    print(f"{'pass' if ok else 'FAIL'} growth degree "
          f"{rep.growth_degree:.3f} vs ceiling {ceiling:.3f}; wrote {outdir}")
    return 0 if ok else 1


def _random_velocity(grid: Grid, seed: int, amplitude: float) -> VelocityField:
    from .spectral import random_solenoidal
    u = random_solenoidal(grid, make_rng(seed))
    band = (grid.kmag <= grid.kcut * 0.25)  # radial mask keeps div u = 0
    u1 = SpectralField(grid, u.u1.coeffs * band)
    u2 = SpectralField(grid, u.u2.coeffs * band)
    speed = VelocityField(u1, u2, trusted=True).max_speed()
    scale = amplitude / max(speed, 1e-300)
    return VelocityField(u1 * scale, u2 * scale, trusted=True)


# ----------------------------------------------------------------------
# check_smallness
# ----------------------------------------------------------------------

def cmd_check_smallness(args) -> int:
    cfg = _load_config(args)
    u0, rho0, _ = _build_initial(cfg)
    law = cfg.make_law()
    rep = check_smallness(u0, rho0, law, eta=cfg.harness_eta,
                          p=cfg.physics_p, C=cfg.harness_big_c,
                          C0=cfg.harness_big_c0, c0=cfg.harness_small_c0)
    outdir = _run_dir(cfg, args.name or "smallness", args.output_root)
    outdir.mkdir(parents=True, exist_ok=True)
    write_report(outdir / "smallness_report.txt", rep.as_entries(), cfg.to_text())
    verdict = "pass" if rep.passed else "FAIL"
    print(f"{verdict} lhs={rep.lhs!r} threshold={rep.threshold!r}; wrote {outdir}")
    return 0 if rep.passed else 1


# ----------------------------------------------------------------------
# verify_inequalities
# ----------------------------------------------------------------------

def _suite_bernstein() -> list[tuple[str, bool, str]]:
    grid = Grid(128, 2.0 * math.pi)
    rng = make_rng(20_240_501)
    # p = q derivative cases are two-sided on an annulus (spread stays O(1));
    # p < q cases are one-sided: random phases push the ratio down with j,
    # only the uniform upper bound is the claim
    out = []
    for name, order, p, q in (("dx_L2_L2", (1, 0), 2.0, 2.0),
                              ("dy_L2_L2", (0, 1), 2.0, 2.0)):
        means = []
        for j in range(2, 7):
            ratios = [verify_bernstein(random_annulus_field(grid, j, rng),
                                       j, p, q, order) for _ in range(5)]
            means.append(float(np.mean(ratios)))
        spread = max(means) / min(means)
        out.append((f"bernstein.{name}", spread <= 2.5,
                    f"ratio means {min(means):.3g}..{max(means):.3g}, spread {spread:.2f}"))
    for name, p, q in (("id_L2_Linf", 2.0, math.inf), ("id_L1_L2", 1.0, 2.0)):
        top = 0.0
        for j in range(2, 7):
            for _ in range(5):
                top = max(top, verify_bernstein(
                    random_annulus_field(grid, j, rng), j, p, q))
        out.append((f"bernstein.{name}", top <= 1.0,
                    f"sup ratio {top:.3g} vs ceiling 1.0"))
    return out


def _suite_heat_block() -> list[tuple[str, bool, str]]:
    grid = Grid(128, 2.0 * math.pi)
    rng = make_rng(77)
    out = []
    for j in range(2, 6):
        lam = 2.0**j
        f = random_annulus_field(grid, j, rng)
        for t in (0.1 / lam**2, 1.0 / lam**2, 4.0 / lam**2):
            ratio = heat_block_decay(f, lam, t)
            lo = math.exp(-t * (8.0 * lam / 3.0) ** 2)
            hi = math.exp(-t * (0.75 * lam) ** 2)
            ok = lo * (1 - 1e-12) <= ratio <= hi * (1 + 1e-12)
            out.append((f"heat_block.j{j}_t{t:.3g}", ok,
                        f"ratio {ratio:.4g} in [{lo:.4g}, {hi:.4g}]"))
    return out


def _suite_lemma23() -> list[tuple[str, bool, str]]:
    out = []
    exact = calculus_integral(1, math.inf, m=2.0)
    out.append(("lemma23.case1_m2_exact", abs(exact.value - 1.0) <= 1e-8,
                f"value {exact.value!r} vs 1"))
    worst1, n1 = math.inf, 0
    for m in (1.5, 2.0, 3.0):
        for t in (10.0, 1e3, math.inf):
            r = calculus_integral(1, t, m=m)
            worst1 = min(worst1, r.bound - r.value)
            n1 += r.satisfied
    out.append(("lemma23.case1_sweep", n1 == 9, f"min margin {worst1:.3g}"))
    worst2, n2, tot2 = math.inf, 0, 0
    for m in GAMMA2_M_GRID:
        for beta in GAMMA2_BETA_SWEEP[::4]:
            r = calculus_integral(2, math.inf, m=m, beta=float(beta))
            worst2 = min(worst2, (r.bound - r.value) / r.bound)
            n2 += r.satisfied
            tot2 += 1
    out.append(("lemma23.case2_sweep", n2 == tot2,
                f"{n2}/{tot2} cells, min rel margin {worst2:.3g}"))
    worst3, n3, tot3 = math.inf, 0, 0
    for m, alpha in GAMMA3_GRID:
        for t in _T_SWEEP[::10]:
            r = calculus_integral(3, float(t), m=m, alpha=alpha)
            worst3 = min(worst3, (r.bound - r.value) / r.bound)
            n3 += r.satisfied
            tot3 += 1
    out.append(("lemma23.case3_sweep", n3 == tot3,
                f"{n3}/{tot3} cells, min rel margin {worst3:.3g}"))
    return out


def _suite_gronwall() -> list[tuple[str, bool, str]]:
    # oracle: y = theta*g + int_0^t h y solved as an ODE.  theta = 1 is the
    # equality case where the majorant is attained, so that half checks
    # sharpness to quadrature accuracy; theta < 1 checks strict domination.
    from scipy.integrate import solve_ivp
    rng = make_rng(4242)
    t = np.linspace(0.0, 3.0, 2001)
    knots = np.linspace(0.0, 3.0, 4)
    worst_gap, worst_margin, fails = 0.0, math.inf, 0
    for i in range(100):
        a, b, c = rng.uniform(0.2, 2.0, size=3)
        w = rng.uniform(0.5, 4.0)
        g = a + b * t + c * np.sin(w * t) + c * w  # keep g positive
        hval = rng.uniform(0.0, 2.0, size=4)
        h = np.interp(t, knots, hval)
        theta = 1.0 if i < 50 else rng.uniform(0.3, 0.9)

        def rhs(s, y):
            return [theta * (b + c * w * math.cos(w * s))
                    + np.interp(s, knots, hval) * y[0]]

        sol = solve_ivp(rhs, (0.0, 3.0), [theta * g[0]], t_eval=t,
                        rtol=1e-10, atol=1e-12)
        bound = gronwall_bound(t, g, h)
        tol = 1e-4 * float(np.max(bound))
        if theta == 1.0:
            gap = float(np.max(np.abs(bound - sol.y[0]))) / float(np.max(bound))
            worst_gap = max(worst_gap, gap)
            if gap > 1e-4:
                fails += 1
        else:
            margin = float(np.min(bound - sol.y[0]))
            worst_margin = min(worst_margin, margin)
            if margin < -tol:
                fails += 1
    return [("gronwall.ode_oracle_100", fails == 0,
             f"equality rel gap {worst_gap:.3g}, strict min margin {worst_margin:.3g}")]


def _suite_product_law() -> list[tuple[str, bool, str]]:
    grid = Grid(128, 2.0 * math.pi)
    eta = 1.5
    reports = product_law_ensemble(grid, eta, n_pairs=8, seed=99,
                                   k_top=grid.kcut * 0.5)
    ratios = [r.ratio for r in reports]
    a = random_multiscale_field(grid, 7, k_top=grid.kcut * 0.5)
    b = random_multiscale_field(grid, 8, k_top=grid.kcut * 0.5)
    base = product_law_check(a, b, eta)
    scaled = product_law_check(SpectralField(grid, 2.0 * a.coeffs), b, eta)
    homog = abs(scaled.ratio - base.ratio) / base.ratio
    one = SpectralField.from_nodal(grid, np.ones((grid.n, grid.n)))
    unit = product_law_check(one, b, eta)
    return [
        ("product_law.ensemble_eta1.5", all(np.isfinite(ratios)),
         f"max ratio {max(ratios):.4g}"),
        ("product_law.homogeneity", homog <= 1e-12, f"rel drift {homog:.3g}"),
        ("product_law.unit_factor", abs(unit.ratio - 1.0) <= 1e-10,
         f"ratio {unit.ratio!r}"),
    ]


def _suite_splitting() -> list[tuple[str, bool, str]]:
    grid = Grid(64, 50.0)
    spec = InitialDataSpec(amplitude=1.0, k_c=1.0, target_p=1.5, seed=3)
    u0, _ = gen_initial_velocity(spec, grid)
    times = np.linspace(0.0, 30.0, 61)
    traj = heat_trajectory(u0, 1.0, times)
    rep = fourier_splitting_check(traj, M=2.0)
    ok = rep.passes(1e-9)
    return [("splitting.heat_M2", ok,
             f"worst violation {rep.worst_violation:.3g} (scale {rep.scale:.3g})")]


_SUITES = {
    "bernstein": _suite_bernstein,
    "heat_block": _suite_heat_block,
    "lemma23": _suite_lemma23,
    "gronwall": _suite_gronwall,
    "product_law": _suite_product_law,
    "splitting": _suite_splitting,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    status = 0
    for name in names:
        for case, ok, margin in _SUITES[name]():
            print(f"{'pass' if ok else 'FAIL'} {case}: {margin}")
            if not ok:
                status = 1
    return status


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _add_config_args(sub):
    sub.add_argument("--config", help="INI config file; defaults apply when omitted")
    sub.add_argument("--set", action="append", default=[], metavar="SEC.KEY=VAL",
                     help="override one config value (repeatable)")
    sub.add_argument("--name", help="run directory name under the output root")
    sub.add_argument("--output-root", help="base directory for run outputs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="insdecay",
                                 description="Decay and regularity experiments "
                                             "for 2D variable-density flow")
    ap.add_argument("--version", action="version", version=f"insdecay {__version__}")
    subs = ap.add_subparsers(dest="command", required=True)

    s = subs.add_parser("simulate", help="integrate one run (or a manifest) and write artifacts")
    _add_config_args(s)
    s.add_argument("--manifest", help="batch file: <name> [config=PATH] [sec.key=val ...]")
    s.add_argument("--jobs", type=int, default=1, help="worker pool size for manifests")
    s.set_defaults(fn=cmd_simulate)

    s = subs.add_parser("decay_fit", help="fit decay exponents from a finished run directory")
    s.add_argument("--run-dir", required=True)
    s.add_argument("--window", nargs=2, type=float, metavar=("T0", "T1"))
    s.set_defaults(fn=cmd_decay_fit)

    s = subs.add_parser("besov_norm", help="print a Besov norm of a snapshot field")
    s.add_argument("field_file")
    s.add_argument("--field", choices=("u1", "u2", "rho"), default="rho")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--log", type=float, metavar="ETA",
                   help="logarithmic space with weight (2+j)^ETA")
    g.add_argument("--classical", nargs=3, type=float, metavar=("S", "P", "R"),
                   help="classical space B^S_{P,R}; 0 stands for infinity")
    s.set_defaults(fn=cmd_besov_norm)

    s = subs.add_parser("transport_reg", help="per-block transport growth experiment")
    _add_config_args(s)
    s.add_argument("--velocity", choices=("shear", "rotation", "random"),
                   default="shear")
    s.add_argument("--amplitude", type=float, default=1.0,
                   help="velocity amplitude (or angular rate for rotation)")
    s.set_defaults(fn=cmd_transport_reg)

    s = subs.add_parser("check_smallness", help="evaluate the viscosity-perturbation gate")
    _add_config_args(s)
    s.set_defaults(fn=cmd_check_smallness)

    s = subs.add_parser("verify_inequalities", help="run one analysis verification suite")
    s.add_argument("suite", choices=sorted(_SUITES) + ["all"])
    s.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver/CFL/projection failures
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
