"""Split Lax-Friedrichs / forward-Euler time integration.

One step freezes the nonlocal term ``A`` on the current field, sweeps every
transported component with Lax-Friedrichs along ``x1`` and then ``x2``, and
finally applies one explicit Euler step of the source.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .diagnostics import RunRecord
from .grid import ConfigurationError, Field, Grid2D
from .models.base import ModelSpec

log = logging.getLogger(__name__)

Hook = Callable[[float, Grid2D, Field], dict]


class BlowUp(RuntimeError):
    """The solution left the representable range; ``t`` is the last good time."""

    def __init__(self, t: float, reason: str):
        super().__init__(f"blow-up after t = {t:.6g}: {reason}")
        self.t = t
        self.reason = reason


@dataclass
class SolverConfig:
    t_end: float
    cfl: float = 0.45
    dt_max: float | None = None
    fixed_dt: float | None = None
    # time between recorded snapshots; None records only the first and last state
    snapshot_interval: float | None = None
    keep_fields: bool = True
    linf_ceiling: float = 1e6
    method: str = "fft"

    def __post_init__(self) -> None:
        if not 0 < self.cfl < 1:
            raise ConfigurationError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.t_end >= 0:
            raise ConfigurationError(f"t_end must be >= 0, got {self.t_end}")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ConfigurationError(f"fixed_dt must be positive, got {self.fixed_dt}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ConfigurationError(f"dt_max must be positive, got {self.dt_max}")
        if self.snapshot_interval is not None and not self.snapshot_interval > 0:
            raise ConfigurationError("snapshot_interval must be positive")


@dataclass
class State:
    t: float
    field: Field
    step: int = 0


class Solver:
    def __init__(self, model: ModelSpec, grid: Grid2D, config: SolverConfig):
        self.model = model
        self.grid = grid
        self.config = config
        self.stencil = model.stencil(grid)
        self.X, self.Y = grid.meshgrid()
        xc, yc = grid.x_centers(), grid.y_centers()
        # coordinates with one ghost cell on each side of the sweep direction
        self._xg = np.meshgrid(
            np.concatenate([[xc[0] - grid.dx], xc, [xc[-1] + grid.dx]]), yc, indexing="ij"
        )
        self._yg = np.meshgrid(
            xc, np.concatenate([[yc[0] - grid.dy], yc, [yc[-1] + grid.dy]]), indexing="ij"
        )

    def initial_state(self, field: Field | None = None) -> State:
        f = field if field is not None else self.model.initial_field(self.grid)
        if f.n_components != self.model.n:
            raise ConfigurationError(
                f"field has {f.n_components} components, model {self.model.name} expects {self.model.n}"
            )
        return State(0.0, f.copy(), 0)

    def cfl_dt(self, state: State) -> float:
        speed = self.model.wave_speed_bound(state.t, self.grid, state.field)
        if not np.isfinite(speed):
            raise BlowUp(state.t, "non-finite wave speed")
        h = self.grid.dx if self.grid.is_1d else min(self.grid.dx, self.grid.dy)
        if speed <= 0:
            return np.inf
        return self.config.cfl * h / speed

    def stable_dt(self, state: State) -> float:
        cfg = self.config
        remaining = cfg.t_end - state.t
        cfl_dt = self.cfl_dt(state)
        if cfg.fixed_dt is not None:
            if cfg.fixed_dt > cfl_dt * (1 + 1e-12):
                warnings.warn(
                    f"fixed_dt = {cfg.fixed_dt:g} exceeds the CFL step {cfl_dt:g} at t = {state.t:g}",
                    RuntimeWarning,
                    stacklevel=2,
                )
            return min(cfg.fixed_dt, remaining)
        dt = cfl_dt
        if cfg.dt_max is not None:
            dt = min(dt, cfg.dt_max)
        return min(dt, remaining)

    def nonlocal_term(self, field: Field) -> np.ndarray:
        return self.model.nonlocal_term(field, self.grid, self.stencil, method=self.config.method)

    def _sweep(self, t: float, i: int, u: np.ndarray, A: np.ndarray, dt: float, axis: int) -> np.ndarray:
        g = self.grid
        ff = self.model.far_field[i]
        pad = ((1, 1), (0, 0)) if axis == 0 else ((0, 0), (1, 1))
        apad = ((0, 0),) + pad
        if g.periodic:
            P = np.pad(u, pad, mode="wrap")
            Ap = np.pad(A, apad, mode="wrap")
        else:
            P = np.pad(u, pad, mode="constant", constant_values=ff)
            Ap = np.pad(A, apad, mode="edge")
        xs, ys = self._xg if axis == 0 else self._yg
        if g.periodic:
            xs, ys = np.pad(self.X, pad, mode="wrap"), np.pad(self.Y, pad, mode="wrap")
        F = self.model.flux(t, xs, ys, i, P, Ap)[axis]
        h = g.dx if axis == 0 else g.dy
        lam = dt / (2.0 * h)
        if axis == 0:
            return 0.5 * (P[:-2] + P[2:]) - lam * (F[2:] - F[:-2])
        return 0.5 * (P[:, :-2] + P[:, 2:]) - lam * (F[:, 2:] - F[:, :-2])

    def convective_step(self, state: State, A: np.ndarray, dt: float) -> Field:
        out = state.field.copy()
        for i, moving in enumerate(self.model.transported):
            if not moving:
                continue
            u = self._sweep(state.t, i, out.values[i], A, dt, axis=0)
            if not self.grid.is_1d:
                u = self._sweep(state.t, i, u, A, dt, axis=1)
            out.values[i] = u
        return out

    def source_step(self, state: State, A: np.ndarray, dt: float) -> Field:
        out = state.field.copy()
        rate = self.model.source(state.t, self.X, self.Y, out.values, A)
        out.values += dt * np.asarray(rate)
        return out

    def step(self, state: State, dt: float | None = None) -> State:
        if dt is None:
            dt = self.stable_dt(state)
        A = self.nonlocal_term(state.field)
        moved = self.convective_step(state, A, dt)
        mid = State(state.t, moved, state.step)
        new = self.source_step(mid, A, dt)
        if not new.is_finite():
            raise BlowUp(state.t, "non-finite values")
        peak = float(np.max(np.abs(new.values)))
        if peak > self.config.linf_ceiling:
            raise BlowUp(state.t, f"max |u| = {peak:.3g} exceeds ceiling {self.config.linf_ceiling:g}")
        return State(state.t + dt, new, state.step + 1)

    def run(
        self,
        field: Field | None = None,
        hooks: Iterable[Hook] = (),
        dt_sequence: Sequence[float] | None = None,
        progress: Callable[[State], None] | None = None,
    ) -> RunRecord:
        """Integrate to ``t_end`` (or until blow-up) and record diagnostics.

        ``dt_sequence`` replays a given list of time steps, so that paired
        runs share the exact same time levels.
        """
        cfg = self.config
        hooks = list(hooks)
        state = self.initial_state(field)
        rec = RunRecord(self.grid, self.model.names, self.model.far_field, cfl=cfg.cfl)

        def record(s: State) -> None:
            extra = dict(self.model.metrics(s.t, self.grid, s.field))
            for hook in hooks:
                extra.update(hook(s.t, self.grid, s.field))
            rec.add(s.t, self.grid, s.field, extra, cfg.keep_fields)

        record(state)
        interval = cfg.snapshot_interval
        next_snap = interval if interval else np.inf
        end = cfg.t_end if dt_sequence is None else state.t + float(np.sum(dt_sequence))
        tol = 1e-12 * max(1.0, abs(end))
        k = 0
        while end - state.t > tol:
            try:
                if dt_sequence is not None:
                    if k >= len(dt_sequence):
                        break
                    dt = float(dt_sequence[k])
                else:
                    dt = self.stable_dt(state)
                    if cfg.fixed_dt is None and state.t + dt > next_snap:
                        dt = next_snap - state.t
                state = self.step(state, dt)
            except BlowUp as exc:
                log.warning("%s", exc)
                rec.halt_reason = "blow-up"
                rec.halt_time = exc.t
                break
            rec.dts.append(dt)
            k += 1
            if progress is not None:
                progress(state)
            if end - state.t <= tol:
                record(state)
            elif interval:
                slack = 0.5 * dt if cfg.fixed_dt is not None else 1e-9 * max(1.0, next_snap)
                if state.t >= next_snap - slack:
                    record(state)
                    while next_snap <= state.t + slack:
                        next_snap += interval
        rec.steps = state.step
        if rec.times[-1] != state.t:
            record(state)
        self.final_state = state
        return rec


def run(
    model: ModelSpec,
    grid: Grid2D,
    config: SolverConfig,
    field: Field | None = None,
    hooks: Iterable[Hook] = (),
    dt_sequence: Sequence[float] | None = None,
) -> RunRecord:
    return Solver(model, grid, config).run(field, hooks, dt_sequence)
