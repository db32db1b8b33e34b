"""Config round-trips and the command-line surface."""

import filecmp
import math

import numpy as np
import pytest

from insdecay.besov import BesovSpec, besov_norm
from insdecay.cli import main
from insdecay.config import ConfigError, SimConfig
from insdecay.decay import E
from insdecay.output import read_diagnostics_csv, read_snapshot
from insdecay.spectral import SpectralField


TINY = [
    "--set", "grid.n=32", "--set", "grid.l=50.0",
    "--set", "time.dt=0.25", "--set", "time.t_final=2.0",
    "--set", "time.snapshot_cadence=4",
    "--set", "initial_data.amplitude=1.0",
    "--set", "physics.density_contrast=0.05",
    "--set", "harness.weights=t_plus_e",
]


# ----------------------------------------------------------------------
# config
# ----------------------------------------------------------------------

def test_config_roundtrip(tmp_path):
    cfg = SimConfig().with_overrides(
        ["grid.n=96", "physics.mu0=0.07", "harness.weights=t_plus_e,power",
         "run.seed=77"])
    assert cfg.grid_n == 96 and isinstance(cfg.grid_n, int)
    assert cfg.physics_mu0 == 0.07
    again = SimConfig.from_text(cfg.to_text())
    assert again == cfg
    path = tmp_path / "run.ini"
    cfg.write(path)
    assert SimConfig.from_file(path) == cfg


def test_config_precedence(tmp_path):
    path = tmp_path / "base.ini"
    SimConfig().with_overrides(["grid.n=64"]).write(path)
    cfg = SimConfig.from_file(path).with_overrides(["grid.n=96"])
    assert cfg.grid_n == 96
    assert cfg.grid_l == SimConfig().grid_l  # untouched keys keep defaults


def test_config_errors():
    with pytest.raises(ConfigError, match="grid.n"):
        SimConfig().with_overrides(["grid.n=abc"])
    with pytest.raises(ConfigError):
        SimConfig().with_overrides(["grid.zzz=1"])
    with pytest.raises(ConfigError):
        SimConfig().with_overrides(["no_dot=1"])
    with pytest.raises(ConfigError, match="density_contrast"):
        SimConfig().with_overrides(["physics.density_contrast=1.5"]).validate()
    with pytest.raises(ConfigError, match="eta"):
        SimConfig().with_overrides(["harness.eta=1.0"]).validate()
    with pytest.raises(ConfigError, match="weights"):
        SimConfig().with_overrides(["harness.weights=cubic"]).validate()
    with pytest.raises(ConfigError, match="grid.n"):
        SimConfig().with_overrides(["grid.n=33"]).validate()
    with pytest.raises(ConfigError):
        SimConfig.from_text("[grid]\nbogus = 3\n")


def test_config_derived_quantities():
    cfg = SimConfig().with_overrides(
        ["grid.l=100.0", "initial_data.density_k_band=4.0",
         "harness.fit_t_min=10.0", "harness.fit_t_max=90.0"])
    assert cfg.density_k_band_abs() == pytest.approx(4.0 * 2 * np.pi / 100.0)
    assert cfg.fit_window() == (10.0, 90.0)
    assert SimConfig().fit_window() is None
    assert SimConfig().weight_list() == ["t_plus_e", "t_plus_e_log"]
    law = SimConfig().make_law()
    assert law.mu0 == SimConfig().physics_mu0
    with pytest.raises(ConfigError, match="taylor_green"):
        SimConfig().with_overrides(
            ["initial_data.profile=taylor_green"]).make_initial_spec()


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def test_simulate_end_to_end(tmp_path, capsys):
    args = ["simulate"] + TINY + ["--name", "tiny",
                                  "--output-root", str(tmp_path)]
    assert main(args) == 0
    out = tmp_path / "tiny"
    for artifact in ("config_resolved.ini", "diagnostics.csv", "report.txt",
                     "decay_u_sq.txt", "decay_grad_u_sq.txt",
                     "ledger_t_plus_e.csv"):
        assert (out / artifact).exists(), artifact
    snaps = sorted((out / "snapshots").glob("snap_*.bin"))
    assert len(snaps) == 3  # t = 0, 1, 2 at cadence 4 of dt 0.25
    report = (out / "report.txt").read_text()
    assert report.startswith("version = insdecay ")
    assert "decay_fit = skipped" in report  # 2 time units cannot reach the window
    diag = read_diagnostics_csv(out / "diagnostics.csv")
    assert diag["t"].size == 9
    assert np.all(np.diff(diag["energy"]) <= 0.0)

    # bytewise determinism through the CLI
    assert main(["simulate"] + TINY + ["--name", "tiny2",
                                       "--output-root", str(tmp_path)]) == 0
    for name in ("diagnostics.csv", "report.txt", "decay_u_sq.txt",
                 "ledger_t_plus_e.csv"):
        assert filecmp.cmp(out / name, tmp_path / "tiny2" / name,
                           shallow=False), name
    assert filecmp.cmp(snaps[0], tmp_path / "tiny2" / "snapshots" / "snap_000000.bin",
                       shallow=False)


def test_simulate_zero_amplitude(tmp_path):
    args = ["simulate"] + TINY + ["--set", "initial_data.amplitude=0.0",
                                  "--name", "rest", "--output-root", str(tmp_path)]
    assert main(args) == 0
    report = (tmp_path / "rest" / "report.txt").read_text()
    assert "decay_fit = skipped" in report
    diag = read_diagnostics_csv(tmp_path / "rest" / "diagnostics.csv")
    assert np.all(diag["l2_u"] == 0.0)


def test_simulate_manifest(tmp_path, capsys):
    manifest = tmp_path / "batch.txt"
    common = ("grid.n=32 grid.l=50.0 time.dt=0.25 time.t_final=1.0 "
              "initial_data.amplitude=1.0 harness.weights=t_plus_e")
    manifest.write_text(
        f"jobA {common} run.seed=1\n"
        f"# comment line\n"
        f"jobB {common} run.seed=2\n")
    args = ["simulate", "--manifest", str(manifest), "--jobs", "2",
            "--output-root", str(tmp_path)]
    assert main(args) == 0
    printed = capsys.readouterr().out
    assert "ok jobA" in printed and "ok jobB" in printed
    a = read_diagnostics_csv(tmp_path / "jobA" / "diagnostics.csv")
    b = read_diagnostics_csv(tmp_path / "jobB" / "diagnostics.csv")
    assert not np.array_equal(a["l2_u"], b["l2_u"])  # seeds differ

    manifest.write_text("dup x=1\ndup x=2\n")
    assert main(["simulate", "--manifest", str(manifest)]) == 2  # dup names


def test_cli_error_codes(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "absent.ini")]) == 2
    assert main(["simulate", "--set", "not-a-pair"]) == 2
    # CFL blowup surfaces as exit 1 (amplitude is in hat units, so the
    # nodal speed needs a genuinely huge value)
    args = ["simulate"] + TINY + ["--set", "initial_data.amplitude=1e7",
                                  "--name", "blow", "--output-root", str(tmp_path)]
    assert main(args) == 1


# ----------------------------------------------------------------------
# decay_fit
# ----------------------------------------------------------------------

def _fake_run_dir(tmp_path):
    out = tmp_path / "fake"
    out.mkdir()
    cfg = SimConfig().with_overrides(["grid.l=200.0", "physics.mu0=0.05"])
    (out / "config_resolved.ini").write_text(cfg.to_text())
    t = np.linspace(0.0, 120.0, 1201)
    cols = {
        "t": t,
        "l2_u": (t + E) ** -0.25,        # squared: exponent 0.5
        "l2_grad_u": (t + E) ** -0.5,    # squared: exponent 1.0
    }
    names = ["t", "l2_u", "l2_grad_u"]
    with open(out / "diagnostics.csv", "w") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(t.size):
            fh.write(",".join(repr(float(cols[n][i])) for n in names) + "\n")
    return out


def test_decay_fit_on_synthetic_run(tmp_path, capsys):
    out = _fake_run_dir(tmp_path)
    assert main(["decay_fit", "--run-dir", str(out),
                 "--window", "10", "100"]) == 0
    printed = capsys.readouterr().out
    entries = dict(line.split(" = ") for line in printed.strip().splitlines())
    assert float(entries["exponent_u_sq"]) == pytest.approx(0.5, abs=1e-9)
    assert float(entries["exponent_grad_u_sq"]) == pytest.approx(1.0, abs=1e-9)
    assert (out / "decay_report.txt").exists()


def test_decay_fit_missing_artifacts(tmp_path):
    assert main(["decay_fit", "--run-dir", str(tmp_path / "nope")]) == 2


# ----------------------------------------------------------------------
# besov_norm
# ----------------------------------------------------------------------

def test_besov_norm_cli(tmp_path, capsys):
    assert main(["simulate"] + TINY + ["--name", "snap",
                                       "--output-root", str(tmp_path)]) == 0
    snap = tmp_path / "snap" / "snapshots" / "snap_000001.bin"
    capsys.readouterr()
    assert main(["besov_norm", str(snap), "--field", "rho",
                 "--log", "1.5"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("B^1.5ln_inf1(rho) = ")
    printed_val = float(line.split(" = ")[1])
    state = read_snapshot(snap)
    direct = besov_norm(SpectralField.from_nodal(state.grid, state.rho.values),
                        BesovSpec.log(1.5))
    assert printed_val == direct

    assert main(["besov_norm", str(snap), "--field", "u1",
                 "--classical", "0", "2", "2"]) == 0
    assert "B^0.0" in capsys.readouterr().out


# ----------------------------------------------------------------------
# check_smallness and verify_inequalities
# ----------------------------------------------------------------------

SMALL_DATA = [
    "--set", "grid.n=64", "--set", f"grid.l={2 * math.pi!r}",
    "--set", "initial_data.amplitude=0.1", "--set", "initial_data.k_c=2.0",
    "--set", "initial_data.density_k_band=3.0",
    "--set", "physics.density_contrast=0.05",
]


def test_check_smallness_exit_codes(tmp_path, capsys):
    base = ["check_smallness"] + SMALL_DATA + ["--output-root", str(tmp_path)]
    assert main(base + ["--set", "physics.viscosity_slope=0.0",
                        "--name", "ok"]) == 0
    assert "pass" in capsys.readouterr().out
    assert (tmp_path / "ok" / "smallness_report.txt").exists()
    assert main(base + ["--set", "physics.viscosity_slope=0.01",
                        "--name", "big"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_lemma23_suite(capsys):
    assert main(["verify_inequalities", "lemma23"]) == 0
    printed = capsys.readouterr().out
    assert "pass" in printed and "FAIL" not in printed
