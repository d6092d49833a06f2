"""Laser cutting of a metal plate: melted height ``h_m`` and solid height ``h_s``.

The melt is pushed along the averaged steepest descent of the surface
``H = h_m + h_s`` by the wind, against a shear term; the beam turns solid into
melt at a rate reduced by the squared cosine of the averaged incidence angle.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ..diagnostics import cut_area, cut_components, ripple_stats, wake_profile
from ..grid import ConfigurationError, Field, Grid2D
from ..kernels import BumpProfile, eval_bump
from .base import ModelSpec, cos2_incidence, smoothstep


@dataclass
class LaserParams:
    tau_g: float = 4.0
    wind: BumpProfile = dc_field(default_factory=lambda: BumpProfile(1.0, 3.6, 4))
    intensity: BumpProfile = dc_field(default_factory=lambda: BumpProfile(2.0, 1.2, 6))
    kernel: BumpProfile = dc_field(default_factory=lambda: BumpProfile(1.0, 2.4, 3))
    plate_thickness: float = 4.5
    hold_point: tuple[float, float] = (3.0, 0.0)
    hold_time: float = 0.1
    speed: float = 40.0
    direction: tuple[float, float] = (1.0, 0.0)
    # None: 2x / 3x the domain diameter, so the cutoff is inactive on the grid
    r_cut: float | None = None
    R_cut: float | None = None

    def __post_init__(self) -> None:
        if self.tau_g < 0:
            raise ConfigurationError(f"tau_g must be >= 0, got {self.tau_g}")
        if self.hold_time < 0:
            raise ConfigurationError(f"hold_time must be >= 0, got {self.hold_time}")
        norm = float(np.hypot(*self.direction))
        if norm == 0:
            raise ConfigurationError("laser direction must be nonzero")
        self.direction = (self.direction[0] / norm, self.direction[1] / norm)
        if self.r_cut is not None and self.r_cut <= 0:
            raise ConfigurationError(f"r_cut must be positive, got {self.r_cut}")
        if self.r_cut is not None and self.R_cut is not None and not self.R_cut > self.r_cut:
            raise ConfigurationError(f"R_cut ({self.R_cut}) must exceed r_cut ({self.r_cut})")


def laser_trajectory(t: float, params: LaserParams | None = None) -> tuple[float, float]:
    p = params or LaserParams()
    travel = p.speed * max(t - p.hold_time, 0.0)
    return (p.hold_point[0] + travel * p.direction[0], p.hold_point[1] + travel * p.direction[1])


class LaserModel(ModelSpec):
    name = "laser"
    names = ("h_m", "h_s")
    transported = (True, False)
    nonlocal_kind = "gradient"
    coupling = (1.0, 1.0)

    def __init__(self, params: LaserParams | None = None, grid: Grid2D | None = None):
        self.params = params or LaserParams()
        p = self.params
        self.kernel = p.kernel
        self.far_field = (0.0, p.plate_thickness)
        diam = grid.diameter if grid is not None else 100.0
        self.r_cut = p.r_cut if p.r_cut is not None else 2.0 * diam
        self.R_cut = p.R_cut if p.R_cut is not None else max(3.0 * diam, 1.5 * self.r_cut)
        if not self.R_cut > self.r_cut:
            raise ConfigurationError(f"R_cut ({self.R_cut}) must exceed r_cut ({self.r_cut})")

    def distance(self, t: float, x1, x2):
        xl = laser_trajectory(t, self.params)
        return np.hypot(np.asarray(x1) - xl[0], np.asarray(x2) - xl[1])

    def wind_and_intensity(self, t: float, x1, x2):
        d = self.distance(t, x1, x2)
        return eval_bump(self.params.wind, d), eval_bump(self.params.intensity, d)

    def shear_cutoff(self, t: float, x1, x2):
        d = self.distance(t, x1, x2)
        s = 1.0 - smoothstep((d - self.r_cut) / (self.R_cut - self.r_cut))
        return self.params.tau_g * s

    def laser_flux(self, t: float, x1, x2, h_m, A):
        w, _ = self.wind_and_intensity(t, x1, x2)
        tg = self.shear_cutoff(t, x1, x2)
        A = np.asarray(A, dtype=float)
        coef = (w * h_m - tg * h_m * h_m) / np.sqrt(1.0 + A[0] ** 2 + A[1] ** 2)
        return -coef * A[0], -coef * A[1]

    def laser_source(self, t: float, x1, x2, A):
        _, i = self.wind_and_intensity(t, x1, x2)
        L = i * cos2_incidence(A)
        return np.stack([L, -L]) if np.ndim(L) else np.array([L, -L])

    def flux(self, t, x1, x2, i, u, A):
        if i == 0:
            return self.laser_flux(t, x1, x2, u, A)
        z = np.zeros(np.shape(u))
        return z, z

    def source(self, t, x1, x2, U, A):
        return self.laser_source(t, x1, x2, A)

    def wave_speed_bound(self, t: float, grid: Grid2D, field: Field) -> float:
        hm = np.max(np.abs(field.values[0]))
        return float(self.params.wind.amplitude + 2.0 * self.params.tau_g * hm)

    def initial_field(self, grid: Grid2D) -> Field:
        return Field.constant(grid, self.far_field, self.names)

    def metrics(self, t: float, grid: Grid2D, field: Field) -> dict[str, float]:
        h_s = field.values[1]
        p = self.params
        stats = ripple_stats(wake_profile(h_s, grid, p.hold_point, p.wind.radius))
        count, amp = stats if stats is not None else (np.nan, np.nan)
        return {
            "cut_area": cut_area(h_s, grid),
            "cut_components": float(cut_components(h_s)),
            "ripple_count": float(count),
            "ripple_amplitude": float(amp),
        }
