"""Experiment configuration.

Flat INI-style text with sections; experiments carry too many knobs for
positional flags.  Precedence is defaults < config file < --set overrides,
and serialize/parse round-trips exactly (floats are written with repr).
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .decay import WEIGHTS
from .grid import Grid
from .initial_data import InitialDataSpec
from .viscosity import ViscosityLaw

__all__ = ["ConfigError", "SimConfig"]


class ConfigError(ValueError):
    """Malformed configuration; message names the offending section.key."""


# (section, key, type, default); attribute name is section_key except where
# the key is already unambiguous on its own
_LAYOUT = [
    ("grid", "n", int, 128),
    ("grid", "l", float, 200.0),
    ("time", "dt", float, 0.5),
    ("time", "t_final", float, 400.0),
    ("time", "snapshot_cadence", int, 0),
    ("physics", "mu0", float, 0.05),
    ("physics", "viscosity", str, "affine"),
    ("physics", "viscosity_slope", float, 0.02),
    ("physics", "viscosity_exponent", float, 1.0),
    ("physics", "density_contrast", float, 0.05),
    ("physics", "p", float, 1.5),
    ("physics", "alpha", float, 1.0),
    ("physics", "eps", float, 0.1),
    ("initial_data", "profile", str, "flat_disk"),
    ("initial_data", "amplitude", float, 5.0),
    ("initial_data", "k_c", float, 1.0),
    ("initial_data", "sigma", float, 0.0),
    ("initial_data", "density_k_band", float, 4.0),
    ("harness", "m_min", float, 2.0),
    ("harness", "m_max", float, 100.0),
    ("harness", "m_count", int, 8),
    ("harness", "g_numerator", float, 2.0),
    ("harness", "weights", str, "t_plus_e,t_plus_e_log"),
    ("harness", "fit_t_min", float, 0.0),
    ("harness", "fit_t_max", float, 0.0),
    ("harness", "eta", float, 1.5),
    ("harness", "big_c", float, 1.0),
    ("harness", "big_c0", float, 1.0),
    ("harness", "small_c0", float, 0.01),
    ("run", "seed", int, 1234),
    ("run", "scheme", str, "spectral"),
    ("run", "cfl_max", float, 0.9),
    ("run", "projection_tol", float, 1e-10),
    ("run", "projection_max_iter", int, 50),
    ("run", "overshoot_delta", float, 0.0),
    ("run", "output_dir", str, ""),
]

_ATTR = {(s, k): f"{s}_{k}" for s, k, _, _ in _LAYOUT}
_TYPE = {(s, k): t for s, k, t, _ in _LAYOUT}


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(section: str, key: str, raw: str):
    typ = _TYPE[(section, key)]
    if typ is str:
        return raw
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(
            f"{section}.{key}: cannot parse {raw!r} as {typ.__name__}") from None


@dataclass(frozen=True)
class SimConfig:
    grid_n: int = 128
    grid_l: float = 200.0
    time_dt: float = 0.5
    time_t_final: float = 400.0
    time_snapshot_cadence: int = 0
    physics_mu0: float = 0.05
    physics_viscosity: str = "affine"
    physics_viscosity_slope: float = 0.02
    physics_viscosity_exponent: float = 1.0
    physics_density_contrast: float = 0.05
    physics_p: float = 1.5
    physics_alpha: float = 1.0
    physics_eps: float = 0.1
    initial_data_profile: str = "flat_disk"
    initial_data_amplitude: float = 5.0
    initial_data_k_c: float = 1.0
    initial_data_sigma: float = 0.0
    initial_data_density_k_band: float = 4.0
    harness_m_min: float = 2.0
    harness_m_max: float = 100.0
    harness_m_count: int = 8
    harness_g_numerator: float = 2.0
    harness_weights: str = "t_plus_e,t_plus_e_log"
    harness_fit_t_min: float = 0.0
    harness_fit_t_max: float = 0.0
    harness_eta: float = 1.5
    harness_big_c: float = 1.0
    harness_big_c0: float = 1.0
    harness_small_c0: float = 0.01
    run_seed: int = 1234
    run_scheme: str = "spectral"
    run_cfl_max: float = 0.9
    run_projection_tol: float = 1e-10
    run_projection_max_iter: int = 50
    run_overshoot_delta: float = 0.0
    run_output_dir: str = ""

    # -- construction --------------------------------------------------

    @classmethod
    def from_file(cls, path) -> "SimConfig":
        text = Path(path).read_text()
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "SimConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        values = {}
        for section in parser.sections():
            for key, raw in parser.items(section):
                if (section, key) not in _ATTR:
                    raise ConfigError(f"unknown config key {section}.{key}")
                values[_ATTR[(section, key)]] = _convert(section, key, raw)
        cfg = cls(**values)
        cfg.validate()
        return cfg

    def with_overrides(self, pairs) -> "SimConfig":
        """Apply command-line overrides of the form section.key=value."""
        values = {}
        for item in pairs:
            head, sep, raw = item.partition("=")
            if not sep:
                raise ConfigError(f"override {item!r} is not of the form section.key=value")
            section, dot, key = head.strip().partition(".")
            key = key.strip()
            if not dot or (section, key) not in _ATTR:
                raise ConfigError(f"unknown config key {head.strip()!r}")
            values[_ATTR[(section, key)]] = _convert(section, key, raw.strip())
        cfg = replace(self, **values)
        cfg.validate()
        return cfg

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        out = io.StringIO()
        current = None
        for section, key, _, _ in _LAYOUT:
            if section != current:
                if current is not None:
                    out.write("\n")
                out.write(f"[{section}]\n")
                current = section
            out.write(f"{key} = {_format(getattr(self, _ATTR[(section, key)]))}\n")
        return out.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    def entries(self):
        """(section.key, formatted value) pairs in layout order."""
        for section, key, _, _ in _LAYOUT:
            yield f"{section}.{key}", _format(getattr(self, _ATTR[(section, key)]))

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        def bad(name, msg):
            raise ConfigError(f"{name}: {msg}")

        if self.grid_n < 8 or self.grid_n % 2:
            bad("grid.n", f"must be an even integer >= 8, got {self.grid_n}")
        if self.grid_l <= 0:
            bad("grid.l", "box side must be positive")
        if self.time_dt <= 0 or self.time_t_final <= 0:
            bad("time.dt", "dt and t_final must be positive")
        if self.time_snapshot_cadence < 0:
            bad("time.snapshot_cadence", "cadence is a step count >= 0")
        if self.physics_mu0 <= 0:
            bad("physics.mu0", "baseline viscosity must be positive")
        if self.physics_viscosity not in ("affine", "power"):
            bad("physics.viscosity", f"unknown law {self.physics_viscosity!r}")
        if not 0.0 <= self.physics_density_contrast < 1.0:
            bad("physics.density_contrast", "contrast must lie in [0, 1)")
        if not 1.0 < self.physics_p < 2.0:
            bad("physics.p", f"p must lie in (1, 2), got {self.physics_p}")
        if not 0.0 < self.physics_eps < 1.0:
            bad("physics.eps", "eps must lie in (0, 1)")
        if self.initial_data_profile not in ("flat_disk", "power", "taylor_green"):
            bad("initial_data.profile", f"unknown profile {self.initial_data_profile!r}")
        if self.initial_data_amplitude < 0:
            bad("initial_data.amplitude", "amplitude must be >= 0 (0 = rest state)")
        if self.initial_data_k_c <= 0:
            bad("initial_data.k_c", "spectral cutoff must be positive")
        if not 0 < self.harness_m_min <= self.harness_m_max:
            bad("harness.m_min", "need 0 < m_min <= m_max")
        if self.harness_m_count < 1:
            bad("harness.m_count", "need at least one sweep point")
        if self.harness_g_numerator <= 0:
            bad("harness.g_numerator", "numerator must be positive")
        for w in self.weight_list():
            if w not in WEIGHTS:
                bad("harness.weights", f"unknown weight {w!r}; pick from {WEIGHTS}")
        if self.harness_fit_t_min < 0 or self.harness_fit_t_max < 0:
            bad("harness.fit_t_min", "window overrides must be >= 0 (0 = automatic)")
        if self.harness_eta <= 1.0:
            bad("harness.eta", "the admissibility gate needs eta > 1")
        if self.harness_small_c0 <= 0:
            bad("harness.small_c0", "threshold constant must be positive")
        if self.run_scheme not in ("spectral", "semi_lagrangian"):
            bad("run.scheme", f"unknown scheme {self.run_scheme!r}")
        if not 0 < self.run_cfl_max:
            bad("run.cfl_max", "CFL ceiling must be positive")
        if self.run_projection_tol <= 0:
            bad("run.projection_tol", "tolerance must be positive")
        if self.run_projection_max_iter < 1:
            bad("run.projection_max_iter", "need at least one iteration")
        if self.run_overshoot_delta < 0:
            bad("run.overshoot_delta", "density excursion budget must be >= 0 "
                "(0 = 1e-3 of the initial range)")

    # -- derived objects -------------------------------------------------

    def make_grid(self) -> Grid:
        return Grid(self.grid_n, self.grid_l)

    def make_law(self) -> ViscosityLaw:
        if self.physics_viscosity == "affine":
            return ViscosityLaw.affine(self.physics_mu0, self.physics_viscosity_slope)
        return ViscosityLaw.power(self.physics_mu0, self.physics_viscosity_exponent)

    def make_initial_spec(self) -> InitialDataSpec:
        profile = self.initial_data_profile
        if profile == "taylor_green":
            raise ConfigError("initial_data.profile: taylor_green has no spectral "
                              "recipe; construct it directly")
        return InitialDataSpec(amplitude=self.initial_data_amplitude,
                               k_c=self.initial_data_k_c,
                               profile=profile,
                               sigma=self.initial_data_sigma,
                               target_p=self.physics_p,
                               alpha=self.physics_alpha,
                               seed=self.run_seed)

    def density_k_band_abs(self) -> float:
        """initial_data.density_k_band counts fundamental modes; the density
        band edge in absolute wavenumber is that times 2 pi / l, which keeps
        the field resolved at any grid size."""
        return self.initial_data_density_k_band * 2.0 * math.pi / self.grid_l

    def weight_list(self) -> list[str]:
        return [w.strip() for w in self.harness_weights.split(",") if w.strip()]

    def fit_window(self) -> tuple[float, float] | None:
        """Explicit window, or None when both overrides are 0 (automatic)."""
        lo, hi = self.harness_fit_t_min, self.harness_fit_t_max
        if lo == 0.0 and hi == 0.0:
            return None
        if not lo < hi:
            raise ConfigError(f"harness.fit_t_min: window ({lo}, {hi}) is empty")
        return (lo, hi)
