"""Run records and scenario diagnostics.

Everything here is a read-only function of snapshots.  The laser metrics
quantify the cut (``h_s < 0``) and the oscillation of its sides; the conveyor
metric measures how much cargo sits outside the belt.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .grid import ConfigurationError, Field, Grid2D, integrate, l1_norm, linf_norm, total_variation

TINY = 1e-300


@dataclass
class RunRecord:
    grid: Grid2D
    names: tuple[str, ...]
    far_field: tuple[float, ...]
    times: list[float] = dc_field(default_factory=list)
    rows: list[dict[str, float]] = dc_field(default_factory=list)
    snapshots: list[np.ndarray] = dc_field(default_factory=list)
    dts: list[float] = dc_field(default_factory=list)
    halt_reason: str = "completed"
    halt_time: float | None = None
    cfl: float | None = None
    steps: int = 0

    @property
    def halted(self) -> bool:
        return self.halt_reason != "completed"

    def series(self, key: str) -> np.ndarray:
        return np.array([row[key] for row in self.rows])

    def field_at(self, k: int) -> Field:
        return Field(self.snapshots[k], self.far_field, self.names)

    def nearest_snapshot(self, t: float) -> int:
        if not self.snapshots:
            raise ValueError("record holds no snapshot fields")
        return int(np.argmin(np.abs(np.array(self.times[: len(self.snapshots)]) - t)))

    def columns(self) -> list[str]:
        return list(self.rows[0].keys()) if self.rows else ["t"]

    def add(self, t: float, grid: Grid2D, field: Field, extra: dict[str, float], keep_field: bool) -> None:
        row = {"t": t}
        for c, name in enumerate(field.names):
            row[f"mass_{name}"] = integrate(field, c, grid)
            row[f"l1_{name}"] = l1_norm(field, c, grid)
            row[f"linf_{name}"] = linf_norm(field, c)
            row[f"tv_{name}"] = total_variation(field, c, grid)
        row.update(extra)
        self.times.append(t)
        self.rows.append(row)
        if keep_field:
            self.snapshots.append(field.values.copy())


def cut_region(h_s: np.ndarray) -> np.ndarray:
    return np.asarray(h_s) < 0.0


def cut_area(h_s: np.ndarray, grid: Grid2D) -> float:
    return float(np.count_nonzero(cut_region(h_s)) * grid.dx * grid.dy)


def cut_half_width_profile(h_s: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Per column, the largest ``|x2|`` of a cut cell (0 for uncut columns)."""
    mask = cut_region(h_s)
    ay = np.abs(grid.y_centers())
    return np.where(mask, ay[np.newaxis, :], 0.0).max(axis=1)


def wake_profile(
    h_s: np.ndarray,
    grid: Grid2D,
    exclude_center: tuple[float, float] = (3.0, 0.0),
    exclude_radius: float = 3.6,
) -> np.ndarray:
    """Half-width profile restricted to cut columns outside the initial-hole footprint."""
    prof = cut_half_width_profile(h_s, grid)
    x = grid.x_centers()
    keep = (prof > 0) & (np.abs(x - exclude_center[0]) > exclude_radius)
    return prof[keep]


def ripple_stats(profile: Sequence[float], min_length: int = 5) -> tuple[int, float] | None:
    """Interior local maxima (flat runs merged) and peak-to-trough amplitude.

    Returns None when the profile is shorter than ``min_length``.
    """
    prof = np.asarray(profile, dtype=float)
    if prof.size < min_length:
        return None
    runs = prof[np.concatenate([[True], np.diff(prof) != 0])]
    inner = runs[1:-1]
    count = int(np.count_nonzero((inner > runs[:-2]) & (inner > runs[2:])))
    return count, float(prof.max() - prof.min())


def cut_components(h_s: np.ndarray) -> int:
    """Number of 4-connected pieces of the cut region."""
    _, n = ndimage.label(cut_region(h_s))
    return int(n)


def outside_mass_fraction(rho: np.ndarray, grid: Grid2D, region: tuple[float, float, float, float]) -> float:
    x0, x1, y0, y1 = region
    X, Y = grid.meshgrid()
    inside = (X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)
    a = np.abs(np.asarray(rho))
    total = a.sum()
    return float(a[~inside].sum() / max(total, TINY))


def symmetry_defect(values, grid: Grid2D) -> float:
    """Largest mismatch between a field and its mirror image across ``x2 = 0``."""
    if grid.ny % 2 or not np.isclose(grid.y_min, -grid.y_max, rtol=0, atol=1e-12 * max(1.0, grid.y_max)):
        raise ConfigurationError("symmetry_defect needs an even ny and a domain symmetric about x2 = 0")
    v = values.values if isinstance(values, Field) else np.asarray(values)
    return float(np.max(np.abs(v - v[..., ::-1])))


def lipschitz_ratio(rec_u: RunRecord, rec_w: RunRecord, delta: float, t: float) -> float:
    """``|u(t) - w(t)|_L1 / delta`` at the snapshot nearest to ``t``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if rec_u.grid != rec_w.grid or rec_u.names != rec_w.names:
        raise ValueError("records were computed on different grids or models")
    if len(rec_u.dts) != len(rec_w.dts) or not np.array_equal(rec_u.dts, rec_w.dts):
        raise ValueError("records were computed with different time steps")
    k = rec_u.nearest_snapshot(t)
    if rec_u.times[k] != rec_w.times[k]:
        raise ValueError("records have different snapshot times")
    diff = np.abs(rec_u.snapshots[k] - rec_w.snapshots[k]).sum() * rec_u.grid.dx * rec_u.grid.dy
    return float(diff / delta)
