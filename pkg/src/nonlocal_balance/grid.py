"""Uniform Cartesian grids, cell-average fields and discrete norms.

Fields store cell averages as an array of shape ``(n_components, nx, ny)``;
index ``i`` runs along ``x1`` and ``j`` along ``x2``.  Everything outside the
grid is represented by one constant per component (the far-field value), or
by periodic wrap-around when the grid is periodic.

A grid with ``ny == 1`` is treated as one-dimensional: the kernel has no
extent along ``x2`` and no jumps are counted along ``x2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np


class ConfigurationError(ValueError):
    """Raised for invalid grid, kernel, model or scenario parameters."""


@dataclass(frozen=True)
class Grid2D:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    periodic: bool = False

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.x_max - self.x_min, self.y_max - self.y_min))

    @staticmethod
    def _centers(lo: float, hi: float, n: int) -> np.ndarray:
        # offsets from the midpoint are exact half-integers, so mirror-image
        # cells of a domain symmetric about 0 get exactly opposite coordinates
        return 0.5 * (lo + hi) + (np.arange(n) - 0.5 * (n - 1)) * ((hi - lo) / n)

    def x_centers(self) -> np.ndarray:
        return self._centers(self.x_min, self.x_max, self.nx)

    def y_centers(self) -> np.ndarray:
        return self._centers(self.y_min, self.y_max, self.ny)

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (float(self.x_centers()[i]), float(self.y_centers()[j]))

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates, both of shape ``(nx, ny)``."""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="ij")

    def translated(self, shift_x: float, shift_y: float) -> "Grid2D":
        return Grid2D(
            self.x_min + shift_x,
            self.x_max + shift_x,
            self.y_min + shift_y,
            self.y_max + shift_y,
            self.nx,
            self.ny,
            self.periodic,
        )


def make_grid(
    x_min: float,
    x_max: float,
    y_min: float,
    y_max: float,
    nx: int,
    ny: int,
    periodic: bool = False,
) -> Grid2D:
    if not (np.isfinite(x_min) and np.isfinite(x_max) and x_max > x_min):
        raise ConfigurationError(f"grid: need x_max > x_min, got [{x_min}, {x_max}]")
    if not (np.isfinite(y_min) and np.isfinite(y_max) and y_max > y_min):
        raise ConfigurationError(f"grid: need y_max > y_min, got [{y_min}, {y_max}]")
    if int(nx) != nx or nx < 1:
        raise ConfigurationError(f"grid: nx must be a positive integer, got {nx}")
    if int(ny) != ny or ny < 1:
        raise ConfigurationError(f"grid: ny must be a positive integer, got {ny}")
    return Grid2D(float(x_min), float(x_max), float(y_min), float(y_max), int(nx), int(ny), bool(periodic))


@dataclass
class Field:
    """Multi-component cell averages with a constant far-field per component."""

    values: np.ndarray
    far_field: tuple[float, ...] = dc_field(default=())
    names: tuple[str, ...] = dc_field(default=())

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 2:
            self.values = self.values[np.newaxis]
        if self.values.ndim != 3:
            raise ConfigurationError("field values must have shape (n, nx, ny)")
        n = self.values.shape[0]
        if not self.far_field:
            self.far_field = (0.0,) * n
        self.far_field = tuple(float(v) for v in self.far_field)
        if len(self.far_field) != n:
            raise ConfigurationError(
                f"field has {n} components but {len(self.far_field)} far-field values"
            )
        if not self.names:
            self.names = tuple(f"u{k + 1}" for k in range(n))
        self.names = tuple(self.names)

    @property
    def n_components(self) -> int:
        return self.values.shape[0]

    def component(self, c: int) -> np.ndarray:
        _check_component(self, c)
        return self.values[c]

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.far_field, self.names)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @classmethod
    def constant(
        cls, grid: Grid2D, levels: Sequence[float], names: Sequence[str] = ()
    ) -> "Field":
        vals = np.empty((len(levels), grid.nx, grid.ny))
        for k, v in enumerate(levels):
            vals[k] = v
        return cls(vals, tuple(levels), tuple(names))


def _check_component(field: Field, c: int) -> None:
    if not (0 <= c < field.n_components):
        raise IndexError(f"component {c} out of range for {field.n_components}-component field")


def integrate(field: Field, component: int, grid: Grid2D) -> float:
    u = field.component(component)
    return float(np.sum(u) * grid.dx * grid.dy)


def l1_norm(field: Field, component: int, grid: Grid2D) -> float:
    u = field.component(component)
    return float(np.sum(np.abs(u)) * grid.dx * grid.dy)


def linf_norm(field: Field, component: int) -> float:
    u = field.component(component)
    return float(np.max(np.abs(u)))


def total_variation(field: Field, component: int, grid: Grid2D) -> float:
    """Anisotropic discrete TV, counting the jumps to the far-field at the edges.

    On a periodic grid the edge jumps wrap around instead.
    """
    u = field.component(component)
    ff = field.far_field[component]
    if grid.periodic:
        ext_x = np.concatenate([u, u[:1]], axis=0)
        ext_y = np.concatenate([u, u[:, :1]], axis=1)
    else:
        ext_x = np.pad(u, ((1, 1), (0, 0)), constant_values=ff)
        ext_y = np.pad(u, ((0, 0), (1, 1)), constant_values=ff)
    tv = np.sum(np.abs(np.diff(ext_x, axis=0))) * grid.dy
    if not grid.is_1d:
        tv += np.sum(np.abs(np.diff(ext_y, axis=1))) * grid.dx
    return float(tv)
