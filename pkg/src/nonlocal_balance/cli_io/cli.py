"""Command-line driver: ``run``, ``compare`` and ``oracle``.

Exit codes: 0 success, 1 oracle deviation above tolerance, 2 configuration
error, 3 blow-up halt, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..diagnostics import RunRecord, lipschitz_ratio
from ..grid import ConfigurationError, Field, Grid2D, make_grid
from ..kernels import BumpProfile, convolve, discretize_kernel
from ..solver import Solver
from . import io
from .config import FORMATS, ScenarioConfig, load_config

log = logging.getLogger("nonlocal_balance")

EXIT_OK, EXIT_ORACLE, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 1, 2, 3, 4
ORACLE_TOL = 1e-10


def _emit(msg: str, quiet: bool) -> None:
    if not quiet:
        print(msg)


def _prepare(cfg: ScenarioConfig, output_dir: str | None, snapshots: int | None) -> Path:
    if snapshots is not None:
        if snapshots < 1:
            raise ConfigurationError(f"--snapshots must be >= 1, got {snapshots}")
        if cfg.solver["t_end"] > 0:
            cfg.solver["snapshot_interval"] = cfg.solver["t_end"] / snapshots
    out = Path(output_dir or cfg.output["directory"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective.cfg").write_text(cfg.to_ini())
    return out


def _formats(cfg: ScenarioConfig) -> set[str]:
    return {f.strip() for f in cfg.output["formats"].split(",") if f.strip() in FORMATS}


def write_artifacts(cfg: ScenarioConfig, grid: Grid2D, rec: RunRecord, out: Path, prefix: str = "") -> None:
    formats = _formats(cfg)
    if "csv" in formats:
        io.write_timeseries(out / f"{prefix}timeseries.csv", rec)
    if not ({"grid", "pgm"} & formats) or not rec.snapshots:
        return
    snap_dir = out / f"{prefix}snapshots"
    snap_dir.mkdir(exist_ok=True)
    comp = cfg.output["raster_component"]
    c = rec.names.index(comp) if comp is not None else len(rec.names) - 1
    for k, t in enumerate(rec.times[: len(rec.snapshots)]):
        field = rec.field_at(k)
        if "grid" in formats:
            io.write_grid_dump(snap_dir / f"snap_{k:04d}.txt", grid, field, t)
        if "pgm" in formats:
            io.write_pgm(snap_dir / f"snap_{k:04d}.pgm", field.values[c], cfg.output["clip_min"], cfg.output["clip_max"])


def run_report(cfg: ScenarioConfig, rec: RunRecord, elapsed: float) -> str:
    lines = [
        f"scenario: {cfg.kind}",
        f"grid: {cfg.grid['nx']} x {cfg.grid['ny']} on [{cfg.grid['x_min']}, {cfg.grid['x_max']}]"
        f" x [{cfg.grid['y_min']}, {cfg.grid['y_max']}] ({cfg.grid['boundary']})",
        f"steps: {rec.steps}",
        f"final time: {rec.times[-1]:.10g}",
        f"status: {rec.halt_reason}" + (f" after t = {rec.halt_time:.10g}" if rec.halted else ""),
        f"wall time: {elapsed:.1f} s",
    ]
    if cfg.kind == "blowup_homogeneous" and rec.times[-1] >= 0.5 - 1e-9:
        k = int(np.argmin(np.abs(np.array(rec.times) - 0.5)))
        u = rec.rows[k]["linf_u"]
        lines.append(f"u({rec.times[k]:.6g}) = {u:.10g} (exact 1/(1-t) = {1.0 / (1.0 - rec.times[k]):.10g})")
    last = rec.rows[-1]
    for key in sorted(last):
        if key != "t":
            lines.append(f"  {key} = {last[key]:.10g}")
    return "\n".join(lines) + "\n"


def run_command(cfg: ScenarioConfig, output_dir: str | None = None, snapshots: int | None = None,
                quiet: bool = False) -> int:
    out = _prepare(cfg, output_dir, snapshots)
    grid = cfg.make_grid()
    solver = Solver(cfg.build_model(grid), grid, cfg.solver_config())
    t0 = time.perf_counter()
    rec = solver.run()
    report = run_report(cfg, rec, time.perf_counter() - t0)
    write_artifacts(cfg, grid, rec, out)
    (out / "report.txt").write_text(report)
    _emit(report.rstrip(), quiet)
    return EXIT_BLOWUP if rec.halted else EXIT_OK


@dataclass
class Perturbation:
    component: str
    shape: str
    args: tuple[float, ...]
    deltas: tuple[float, ...]
    identical: bool = False

    def mask(self, grid: Grid2D) -> np.ndarray:
        X, Y = grid.meshgrid()
        if self.shape == "all":
            m = np.ones(grid.shape, bool)
        elif self.shape == "disc":
            cx, cy, r = self.args
            m = (X - cx) ** 2 + (Y - cy) ** 2 <= r * r
        else:
            x0, x1, y0, y1 = self.args
            m = (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)
        if not m.any():
            raise ConfigurationError(f"perturbation {self.shape}{self.args} contains no grid cell")
        return m

    def apply(self, field: Field, grid: Grid2D, delta: float) -> Field:
        """Add a constant bump whose L1 size is exactly ``delta``."""
        if self.component not in field.names:
            raise ConfigurationError(f"--perturb component: {self.component!r} is not one of {', '.join(field.names)}")
        m = self.mask(grid)
        out = field.copy()
        out.values[field.names.index(self.component)][m] += delta / (m.sum() * grid.cell_area)
        return out


_SHAPE = re.compile(r"^(all|disc|box)(?:\(([^)]*)\))?$")


def parse_perturbation(spec: str) -> Perturbation:
    """``component=h_m;shape=disc(3,0,1);delta=1e-2,1e-3[;mode=identical]``."""
    items = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        key, sep, val = part.partition("=")
        if not sep:
            raise ConfigurationError(f"--perturb: expected key=value, got {part!r}")
        items[key.strip()] = val.strip()
    unknown = set(items) - {"component", "shape", "delta", "mode"}
    if unknown:
        raise ConfigurationError(f"--perturb: unknown key(s) {', '.join(sorted(unknown))}")
    if "component" not in items or "delta" not in items:
        raise ConfigurationError("--perturb: component and delta are required")
    m = _SHAPE.match(items.get("shape", "all").replace(" ", ""))
    if not m:
        raise ConfigurationError(f"--perturb shape: expected all, disc(cx,cy,r) or box(x0,x1,y0,y1), got {items['shape']!r}")
    try:
        args = tuple(float(a) for a in m.group(2).split(",")) if m.group(2) else ()
        deltas = tuple(float(d) for d in items["delta"].split(","))
    except ValueError as exc:
        raise ConfigurationError(f"--perturb: {exc}") from None
    need = {"all": 0, "disc": 3, "box": 4}[m.group(1)]
    if len(args) != need:
        raise ConfigurationError(f"--perturb shape: {m.group(1)} takes {need} arguments, got {len(args)}")
    if m.group(1) == "disc" and not args[2] > 0:
        raise ConfigurationError("--perturb shape: disc radius must be positive")
    if not deltas or any(not d > 0 for d in deltas):
        raise ConfigurationError(f"--perturb delta: every delta must be positive, got {items['delta']}")
    mode = items.get("mode", "difference")
    if mode not in ("difference", "identical"):
        raise ConfigurationError(f"--perturb mode: expected difference or identical, got {mode!r}")
    return Perturbation(items["component"], m.group(1), args, deltas, mode == "identical")


def compare_runs(cfg: ScenarioConfig, pert: Perturbation) -> tuple[RunRecord, dict[float, RunRecord], np.ndarray]:
    """Base run plus one run per delta on the same time levels; ratio table ``(n_times, n_deltas)``."""
    grid = cfg.make_grid()
    model = cfg.build_model(grid)
    solver_cfg = cfg.solver_config()
    solver = Solver(model, grid, solver_cfg)
    base_field = model.initial_field(grid)
    shared = None if pert.identical else solver.run(base_field)
    bases, runs = {}, {}
    for d in pert.deltas:
        w = pert.apply(base_field, grid, d)
        bases[d] = solver.run(w) if pert.identical else shared
        runs[d] = solver.run(w, dt_sequence=bases[d].dts)
        log.info("delta = %g done (%d steps)", d, runs[d].steps)
    base = bases[pert.deltas[0]]
    n = min([len(base.snapshots)] + [len(r.snapshots) for r in runs.values()])
    table = np.empty((n, len(pert.deltas)))
    for k in range(n):
        for c, d in enumerate(pert.deltas):
            table[k, c] = lipschitz_ratio(bases[d], runs[d], d, base.times[k])
    return base, runs, table


def compare_command(cfg: ScenarioConfig, pert: Perturbation, output_dir: str | None = None,
                    snapshots: int | None = None, quiet: bool = False) -> int:
    out = _prepare(cfg, output_dir, snapshots)
    base, runs, table = compare_runs(cfg, pert)
    header = ["t"] + [f"ratio_delta_{d:g}" for d in pert.deltas]
    lines = [",".join(header)]
    for k in range(table.shape[0]):
        lines.append(",".join([repr(float(base.times[k]))] + [repr(float(v)) for v in table[k]]))
    (out / "lipschitz.csv").write_text("\n".join(lines) + "\n")
    io.write_timeseries(out / "timeseries.csv", base)
    _emit("\n".join(lines), quiet)
    halted = base.halted or any(r.halted for r in runs.values())
    return EXIT_BLOWUP if halted else EXIT_OK


def oracle_deviation(n: int, seed: int) -> float:
    """Max |fast - direct| for a random field and far-field value on an ``n x n`` unit square."""
    rng = np.random.default_rng([seed, n])
    grid = make_grid(0.0, 1.0, 0.0, 1.0, n, n)
    radius = min(8, n) / n  # eight cells, or the whole grid when smaller
    stencil = discretize_kernel(BumpProfile(1.0, radius, 3), grid.dx, grid.dy)
    u = rng.uniform(-1.0, 1.0, size=grid.shape)
    ff = float(rng.uniform(-1.0, 1.0))
    fast = convolve(u, stencil, grid, far_field=ff, method="fft")
    slow = convolve(u, stencil, grid, far_field=ff, method="direct")
    return float(np.max(np.abs(fast - slow)))


def oracle_command(sizes: Sequence[int], seed: int = 0, quiet: bool = False) -> int:
    worst = 0.0
    for n in sizes:
        if n < 1:
            raise ConfigurationError(f"--sizes: grid sizes must be >= 1, got {n}")
        dev = oracle_deviation(n, seed)
        worst = max(worst, dev)
        verdict = "ok" if dev <= ORACLE_TOL else "FAIL"
        _emit(f"{n}x{n}: max |fast - direct| = {dev:.3e} [{verdict}]", quiet)
    return EXIT_OK if worst <= ORACLE_TOL else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", help="directory for artifacts (overrides [output] directory)")
    common.add_argument("--snapshots", type=int, help="number of evenly spaced snapshots to record")
    common.add_argument("--seed", type=int, default=0, help="seed for random fields")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")

    p = argparse.ArgumentParser(prog="nonlocal-balance", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run a scenario")
    r.add_argument("config")
    c = sub.add_parser("compare", parents=[common], help="paired runs and Lipschitz ratios")
    c.add_argument("config")
    c.add_argument("--perturb", required=True,
                   help="component=NAME;shape=all|disc(cx,cy,r)|box(x0,x1,y0,y1);delta=D1,D2,...")
    o = sub.add_parser("oracle", parents=[common], help="fast vs direct convolution check")
    o.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        if args.command == "oracle":
            return oracle_command(args.sizes, args.seed, args.quiet)
        cfg = load_config(args.config)
        if args.command == "run":
            return run_command(cfg, args.output_dir, args.snapshots, args.quiet)
        return compare_command(cfg, parse_perturbation(args.perturb), args.output_dir, args.snapshots, args.quiet)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
