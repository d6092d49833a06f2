"""Scenario configuration files.

A configuration is a sectioned ``key = value`` file (read with
:mod:`configparser`) with five sections::

    [scenario]  kind = laser | conveyor | blowup_homogeneous | blowup_psi | custom
                factory = package.module:callable      (custom only; called with the
                [model] keys as keyword arguments, plus ``grid`` if it accepts one)
    [grid]      x_min, x_max, y_min, y_max, nx, ny, boundary = far-field | periodic
    [model]     the constants of the chosen model (see ``MODEL_DEFAULTS``)
    [solver]    t_end, cfl, fixed_dt, dt_max, snapshot_interval, method, linf_ceiling
    [output]    directory, formats, raster_component, clip_min, clip_max

Every key is optional; missing keys take the defaults of the scenario kind.
Unknown sections or keys are rejected.  ``none`` (or ``auto`` for the laser
cutoff radii) leaves an optional value unset.
"""

from __future__ import annotations

import configparser
import importlib
import inspect
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

from ..grid import ConfigurationError, Grid2D, make_grid
from ..kernels import BumpProfile
from ..models import BlowupModel, ConveyorModel, ConveyorParams, LaserModel, LaserParams
from ..models.base import ModelSpec
from ..solver import SolverConfig

KINDS = ("laser", "conveyor", "blowup_homogeneous", "blowup_psi", "custom")
SECTIONS = ("scenario", "grid", "model", "solver", "output")

GRID_DEFAULTS: dict[str, dict[str, Any]] = {
    # desk scale: same plate width as the reference run, half its length, 5x coarser mesh
    "laser": dict(x_min=0.0, x_max=20.0, y_min=-2.0, y_max=2.0, nx=800, ny=160, boundary="far-field"),
    "conveyor": dict(x_min=-1.0, x_max=11.0, y_min=-1.5, y_max=1.5, nx=480, ny=120, boundary="far-field"),
    "blowup_homogeneous": dict(x_min=-3.0, x_max=3.0, y_min=0.0, y_max=1.0, nx=60, ny=1, boundary="periodic"),
    "blowup_psi": dict(x_min=-3.0, x_max=3.0, y_min=-0.5, y_max=0.5, nx=6000, ny=1, boundary="far-field"),
    "custom": dict(x_min=0.0, x_max=1.0, y_min=0.0, y_max=1.0, nx=64, ny=64, boundary="far-field"),
}

MODEL_DEFAULTS: dict[str, dict[str, Any]] = {
    "laser": dict(
        tau_g=4.0,
        wind_amplitude=1.0,
        wind_radius=3.6,
        wind_exponent=4,
        intensity_amplitude=2.0,
        intensity_radius=1.2,
        intensity_exponent=6,
        kernel_radius=2.4,
        kernel_exponent=3,
        plate_thickness=4.5,
        hold_x1=3.0,
        hold_x2=0.0,
        hold_time=0.1,
        speed=40.0,
        direction_x1=1.0,
        direction_x2=0.0,
        r_cut=None,
        R_cut=None,
    ),
    "conveyor": dict(
        ell=1.0,
        length=10.0,
        delta=0.3,
        eps=0.5,
        eps_hat=1.0,
        mu=0.05,
        rho_max=1.0,
        v_belt=1.0,
        a=1.0,
        q_in=2.0,
        q_out=5.0,
        kappa=0.1,
        bump_exponent=8,
        kernel_radius=0.5,
        kernel_exponent=3,
    ),
    "blowup_homogeneous": dict(kernel_radius=0.5, kernel_exponent=3),
    "blowup_psi": dict(kernel_radius=0.5, kernel_exponent=3),
    "custom": {},
}

SOLVER_DEFAULTS: dict[str, dict[str, Any]] = {
    "laser": dict(t_end=0.4, cfl=0.45, fixed_dt=None, dt_max=None, snapshot_interval=0.1),
    "conveyor": dict(t_end=1.0, cfl=0.45, fixed_dt=None, dt_max=None, snapshot_interval=0.05),
    "blowup_homogeneous": dict(t_end=1.05, cfl=0.45, fixed_dt=1e-3, dt_max=None, snapshot_interval=0.05),
    "blowup_psi": dict(t_end=1.05, cfl=0.45, fixed_dt=1e-3, dt_max=None, snapshot_interval=0.01),
    "custom": dict(t_end=1.0, cfl=0.45, fixed_dt=None, dt_max=None, snapshot_interval=None),
}
for _d in SOLVER_DEFAULTS.values():
    _d.update(method="fft", linf_ceiling=1e6)

OUTPUT_DEFAULTS: dict[str, dict[str, Any]] = {
    "laser": dict(raster_component="h_s", clip_min=0.0, clip_max=4.5),
    "conveyor": dict(raster_component="rho", clip_min=0.0, clip_max=1.2),
    "blowup_homogeneous": dict(raster_component="u", clip_min=0.0, clip_max=10.0),
    "blowup_psi": dict(raster_component="u", clip_min=0.0, clip_max=10.0),
    "custom": dict(raster_component=None, clip_min=0.0, clip_max=1.0),
}
for _d in OUTPUT_DEFAULTS.values():
    _d.update(directory="output", formats="csv,grid,pgm")

INT_KEYS = {"nx", "ny", "wind_exponent", "intensity_exponent", "kernel_exponent", "bump_exponent"}
STR_KEYS = {"boundary", "method", "directory", "formats", "raster_component", "kind", "factory"}
FORMATS = ("csv", "grid", "pgm")


@dataclass
class ScenarioConfig:
    kind: str
    grid: dict[str, Any]
    model: dict[str, Any]
    solver: dict[str, Any]
    output: dict[str, Any]
    factory: str | None = None
    source: str | None = None
    _model_cache: ModelSpec | None = dc_field(default=None, repr=False, compare=False)

    def make_grid(self) -> Grid2D:
        g = self.grid
        return make_grid(
            g["x_min"], g["x_max"], g["y_min"], g["y_max"], g["nx"], g["ny"], periodic=g["boundary"] == "periodic"
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def build_model(self, grid: Grid2D | None = None) -> ModelSpec:
        grid = grid or self.make_grid()
        m = self.model
        kind = self.kind
        try:
            if kind == "laser":
                params = LaserParams(
                    tau_g=m["tau_g"],
                    wind=BumpProfile(m["wind_amplitude"], m["wind_radius"], m["wind_exponent"]),
                    intensity=BumpProfile(m["intensity_amplitude"], m["intensity_radius"], m["intensity_exponent"]),
                    kernel=BumpProfile(1.0, m["kernel_radius"], m["kernel_exponent"]),
                    plate_thickness=m["plate_thickness"],
                    hold_point=(m["hold_x1"], m["hold_x2"]),
                    hold_time=m["hold_time"],
                    speed=m["speed"],
                    direction=(m["direction_x1"], m["direction_x2"]),
                    r_cut=m["r_cut"],
                    R_cut=m["R_cut"],
                )
                return LaserModel(params, grid)
            if kind == "conveyor":
                fields = {k: v for k, v in m.items() if not k.startswith("kernel_")}
                kernel = BumpProfile(1.0, m["kernel_radius"], m["kernel_exponent"])
                return ConveyorModel(ConveyorParams(kernel=kernel, **fields))
            if kind in ("blowup_homogeneous", "blowup_psi"):
                kernel = BumpProfile(1.0, m["kernel_radius"], m["kernel_exponent"])
                return BlowupModel(kind.split("_", 1)[1], kernel)
        except ConfigurationError as exc:
            raise ConfigurationError(f"[model]: {exc}") from exc
        factory = _load_factory(self.factory)
        kwargs = dict(m)
        if "grid" in inspect.signature(factory).parameters:
            kwargs["grid"] = grid
        try:
            return factory(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(f"[model]: {self.factory} rejected the parameters ({exc})") from exc

    def to_ini(self) -> str:
        """The effective configuration, every default resolved."""
        cp = _parser()
        cp["scenario"] = {"kind": self.kind}
        if self.factory:
            cp["scenario"]["factory"] = self.factory
        for name in ("grid", "model", "solver", "output"):
            cp[name] = {k: _format(v) for k, v in getattr(self, name).items()}
        lines = []
        for name in SECTIONS:
            lines.append(f"[{name}]")
            lines.extend(f"{k} = {v}" for k, v in cp[name].items())
            lines.append("")
        return "\n".join(lines)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep R_cut distinct from r_cut
    return cp


def _format(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _convert(section: str, key: str, raw: str) -> Any:
    text = raw.strip()
    if key in STR_KEYS:
        return None if text.lower() == "none" else text
    if text.lower() in ("none", "auto", ""):
        return None
    try:
        if key in INT_KEYS:
            val = float(text)
            if val != int(val):
                raise ValueError
            return int(val)
        return float(text)
    except ValueError:
        kind = "an integer" if key in INT_KEYS else "a number"
        raise ConfigurationError(f"[{section}] {key}: expected {kind}, got {raw!r}") from None


def _load_factory(spec: str | None):
    if not spec or ":" not in spec:
        raise ConfigurationError("[scenario] factory: expected 'package.module:callable' for kind = custom")
    mod, _, attr = spec.partition(":")
    try:
        return getattr(importlib.import_module(mod), attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigurationError(f"[scenario] factory: cannot load {spec!r} ({exc})") from exc


def parse_config(text: str, source: str | None = None) -> ScenarioConfig:
    cp = _parser()
    try:
        cp.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse configuration: {exc}") from exc
    for name in cp.sections():
        if name not in SECTIONS:
            raise ConfigurationError(f"[{name}]: unknown section (expected one of {', '.join(SECTIONS)})")

    scen = dict(cp["scenario"]) if cp.has_section("scenario") else {}
    for key in scen:
        if key not in ("kind", "factory"):
            raise ConfigurationError(f"[scenario] {key}: unknown key")
    kind = scen.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigurationError(f"[scenario] kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    factory = scen.get("factory")
    if factory and kind != "custom":
        raise ConfigurationError("[scenario] factory: only allowed with kind = custom")

    blocks = {
        "grid": dict(GRID_DEFAULTS[kind]),
        "model": dict(MODEL_DEFAULTS[kind]),
        "solver": dict(SOLVER_DEFAULTS[kind]),
        "output": dict(OUTPUT_DEFAULTS[kind]),
    }
    for name, block in blocks.items():
        if not cp.has_section(name):
            continue
        for key, raw in cp[name].items():
            if kind == "custom" and name == "model":
                try:
                    block[key] = _convert(name, key, raw)
                except ConfigurationError:
                    block[key] = raw.strip()  # passed to the factory as text
                continue
            if key not in block:
                raise ConfigurationError(f"[{name}] {key}: unknown key for kind = {kind}")
            block[key] = _convert(name, key, raw)

    cfg = ScenarioConfig(kind, blocks["grid"], blocks["model"], blocks["solver"], blocks["output"], factory, source)
    validate(cfg)
    return cfg


def validate(cfg: ScenarioConfig) -> None:
    """Check every constraint, naming the offending key."""
    g = cfg.grid
    if g["boundary"] not in ("far-field", "periodic"):
        raise ConfigurationError(f"[grid] boundary: expected far-field or periodic, got {g['boundary']!r}")
    for key in ("x_min", "x_max", "y_min", "y_max", "nx", "ny"):
        if g[key] is None:
            raise ConfigurationError(f"[grid] {key}: a value is required")
    try:
        grid = cfg.make_grid()
    except ConfigurationError as exc:
        raise ConfigurationError(f"[grid]: {exc}") from exc

    m = cfg.model
    if cfg.kind != "custom":
        for key, val in m.items():
            if val is None and key not in ("r_cut", "R_cut"):
                raise ConfigurationError(f"[model] {key}: a value is required")
        for key in ("tau_g",):
            if key in m and m[key] < 0:
                raise ConfigurationError(f"[model] {key}: must be >= 0, got {m[key]}")
        for key, val in m.items():
            if (key.endswith("_radius") or key in ("plate_thickness", "r_cut", "R_cut")) and val is not None:
                if not val > 0:
                    raise ConfigurationError(f"[model] {key}: must be positive, got {val}")
            if key.endswith("_exponent") and val < 2:
                raise ConfigurationError(f"[model] {key}: must be an integer >= 2, got {val}")
        if m.get("r_cut") is not None and m.get("R_cut") is not None and not m["R_cut"] > m["r_cut"]:
            raise ConfigurationError(f"[model] R_cut: must exceed r_cut ({m['r_cut']}), got {m['R_cut']}")
        for key in ("ell", "length", "delta", "eps", "mu", "rho_max", "kappa", "speed"):
            if key in m and not m[key] > 0:
                raise ConfigurationError(f"[model] {key}: must be positive, got {m[key]}")
        if "eps_hat" in m and not m["eps_hat"] > m["eps"]:
            raise ConfigurationError(f"[model] eps_hat: must exceed eps ({m['eps']}), got {m['eps_hat']}")
        if "a" in m and not 0 < m["a"] < m["length"] / 2:
            raise ConfigurationError(f"[model] a: need 0 < a < length/2, got {m['a']}")

    s = cfg.solver
    if s["t_end"] is None or not s["t_end"] >= 0:
        raise ConfigurationError(f"[solver] t_end: must be >= 0, got {s['t_end']}")
    if s["cfl"] is None or not 0 < s["cfl"] < 1:
        raise ConfigurationError(f"[solver] cfl: must lie in (0, 1), got {s['cfl']}")
    for key in ("fixed_dt", "dt_max", "snapshot_interval"):
        if s[key] is not None and not s[key] > 0:
            raise ConfigurationError(f"[solver] {key}: must be positive, got {s[key]}")
    if s["method"] not in ("fft", "direct"):
        raise ConfigurationError(f"[solver] method: expected fft or direct, got {s['method']!r}")
    if s["linf_ceiling"] is None or not s["linf_ceiling"] > 0:
        raise ConfigurationError(f"[solver] linf_ceiling: must be positive, got {s['linf_ceiling']}")

    o = cfg.output
    if o["clip_min"] is None or o["clip_max"] is None or not o["clip_min"] < o["clip_max"]:
        raise ConfigurationError(f"[output] clip_max: need clip_min < clip_max, got {o['clip_min']}, {o['clip_max']}")
    formats = [f.strip() for f in (o["formats"] or "").split(",") if f.strip()]
    for f in formats:
        if f not in FORMATS:
            raise ConfigurationError(f"[output] formats: unknown format {f!r} (expected {', '.join(FORMATS)})")
    if not o["directory"]:
        raise ConfigurationError("[output] directory: a value is required")

    model = cfg.build_model(grid)
    if not isinstance(model, ModelSpec):
        raise ConfigurationError("[scenario] factory: must return a ModelSpec")
    if o["raster_component"] is not None and o["raster_component"] not in model.names:
        raise ConfigurationError(
            f"[output] raster_component: {o['raster_component']!r} is not one of {', '.join(model.names)}"
        )
    cfg._model_cache = model


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc.strerror or exc}") from exc
    return parse_config(text, str(path))


def shipped_config(name: str) -> Path:
    """Path of one of the configurations bundled with the package."""
    here = Path(__file__).resolve().parent.parent / "configs"
    path = here / (name if name.endswith(".cfg") else name + ".cfg")
    if not path.exists():
        raise ConfigurationError(f"no shipped configuration named {name!r}")
    return path
