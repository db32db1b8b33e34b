"""On-disk artifacts: snapshots, diagnostics CSV, reports, run directories.

Snapshot layout (version 1): three ASCII header lines, a blank line, then
raw little-endian arrays in C order:

    INSDECAY-SNAPSHOT v1
    n=<int> l=<repr float> dealias_fraction=<repr float> t=<repr float>
    layout=u1_coeffs,u2_coeffs,rho_nodal dtypes=<c16,<c16,<f8 order=C

Floats are serialized with repr everywhere so identical runs produce
byte-identical files; no wall-clock data is ever written.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from . import __version__
from .grid import Grid
from .solver import DIAGNOSTIC_COLUMNS, FlowState, Trajectory
from .spectral import DensityField, SpectralField, VelocityField

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "write_diagnostics_csv",
    "write_report",
    "default_output_root",
]

_MAGIC = "INSDECAY-SNAPSHOT v1"
OUTPUT_ROOT_ENV = "INSDECAY_OUTPUT_ROOT"


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "."))


def write_snapshot(path, state: FlowState) -> None:
    g = state.grid
    header = (
        f"{_MAGIC}\n"
        f"n={g.n} l={g.l!r} dealias_fraction={g.dealias_fraction!r} t={state.t!r}\n"
        f"layout=u1_coeffs,u2_coeffs,rho_nodal dtypes=<c16,<c16,<f8 order=C\n"
        f"\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(state.u.u1.coeffs, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(state.u.u2.coeffs, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(state.rho.values, dtype="<f8").tobytes())


def read_snapshot(path) -> FlowState:
    with open(path, "rb") as fh:
        magic = fh.readline().decode("ascii").strip()
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a snapshot file (magic {magic!r})")
        meta = dict(tok.split("=", 1) for tok in
                    fh.readline().decode("ascii").split())
        layout = dict(tok.split("=", 1) for tok in
                      fh.readline().decode("ascii").split())
        if layout.get("layout") != "u1_coeffs,u2_coeffs,rho_nodal":
            raise ValueError(f"{path}: unsupported layout {layout.get('layout')!r}")
        fh.readline()  # blank separator
        n = int(meta["n"])
        grid = Grid(n=n, l=float(meta["l"]),
                    dealias_fraction=float(meta["dealias_fraction"]))
        count = n * n
        c1 = np.frombuffer(fh.read(count * 16), dtype="<c16").reshape(n, n)
        c2 = np.frombuffer(fh.read(count * 16), dtype="<c16").reshape(n, n)
        rho = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(n, n)
    u = VelocityField(SpectralField(grid, c1.astype(np.complex128)),
                      SpectralField(grid, c2.astype(np.complex128)),
                      trusted=True)
    return FlowState(t=float(meta["t"]), u=u,
                     rho=DensityField(grid, rho.astype(np.float64),
                                      require_positive=False))


def write_diagnostics_csv(path, traj: Trajectory) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(DIAGNOSTIC_COLUMNS) + "\n")
        for row in traj.diagnostics_rows():
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_diagnostics_csv(path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="ascii") as fh:
        names = fh.readline().strip().split(",")
        data = [[] for _ in names]
        for line in fh:
            for slot, tok in zip(data, line.strip().split(",")):
                slot.append(float(tok))
    return {name: np.asarray(col) for name, col in zip(names, data)}


def write_two_column(path, x, y) -> None:
    """Plot-ready whitespace-separated data."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for a, b in zip(x, y):
            fh.write(f"{float(a)!r} {float(b)!r}\n")


def write_report(path, entries: dict, config_text: str | None = None) -> None:
    """key = value report; embeds the resolved config and package version."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"version = insdecay {__version__}\n")
        for key, val in entries.items():
            if isinstance(val, float):
                val = repr(val)
            fh.write(f"{key} = {val}\n")
        if config_text is not None:
            fh.write("\n# resolved configuration\n")
            for line in config_text.rstrip("\n").split("\n"):
                fh.write(f"# {line}\n")
