"""Model interface shared by the laser, conveyor and blow-up systems."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..grid import Field, Grid2D
from ..kernels import BumpProfile, KernelStencil, convolve, convolved_gradient, discretize_kernel


def smoothstep(s):
    """Quintic ``6s^5 - 15s^4 + 10s^3`` clamped to [0, 1]; C2 at both ends."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    val = s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    return val if val.ndim else float(val)


SMOOTHSTEP_MAX_SLOPE = 1.875


def smooth_heaviside(xi, mu: float):
    """C2 regularization of the Heaviside step, exact outside ``[-mu, mu]``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return smoothstep((np.asarray(xi, dtype=float) + mu) / (2.0 * mu))


def cos2_incidence(A):
    """``1 / (1 + |A|^2)`` for a 2-vector (or stacked ``(2, ...)`` arrays)."""
    A = np.asarray(A, dtype=float)
    val = 1.0 / (1.0 + A[0] ** 2 + A[1] ** 2)
    return val if np.ndim(val) else float(val)


class ModelSpec:
    """A system ``d_t u_i + div flux_i(t, x, u_i, A) = source_i(t, x, u, A)``.

    ``A`` is the nonlocal term, recomputed from the whole field once per
    step: either ``grad(eta * v)`` (``nonlocal_kind = "gradient"``) or
    ``eta * v`` (``"convolve"``), with ``v = sum_k coupling[k] * u_k``.
    Components with ``transported[i] == False`` have zero flux and skip the
    convective sweep.
    """

    name = "model"
    names: tuple[str, ...] = ()
    far_field: tuple[float, ...] = ()
    transported: tuple[bool, ...] = ()
    nonlocal_kind = "gradient"
    coupling: tuple[float, ...] = ()
    kernel: BumpProfile

    @property
    def n(self) -> int:
        return len(self.names)

    def stencil(self, grid: Grid2D) -> KernelStencil:
        return discretize_kernel(self.kernel, grid.dx, grid.dy, one_d=grid.is_1d)

    def nonlocal_term(self, field: Field, grid: Grid2D, stencil: KernelStencil, method: str = "fft") -> np.ndarray:
        if self.nonlocal_kind == "gradient":
            return convolved_gradient(field, self.coupling, stencil, grid, method=method)
        v = np.zeros(grid.shape)
        ff = 0.0
        for k, c in enumerate(self.coupling):
            v += c * field.values[k]
            ff += c * field.far_field[k]
        return convolve(v, stencil, grid, far_field=ff, method=method)[np.newaxis]

    def flux(self, t: float, x1, x2, i: int, u, A):
        raise NotImplementedError

    def source(self, t: float, x1, x2, U, A):
        raise NotImplementedError

    def wave_speed_bound(self, t: float, grid: Grid2D, field: Field) -> float:
        raise NotImplementedError

    def initial_field(self, grid: Grid2D) -> Field:
        raise NotImplementedError

    def metrics(self, t: float, grid: Grid2D, field: Field) -> dict[str, float]:
        """Scenario-specific diagnostics recorded alongside the norms."""
        return {}

    def _field(self, grid: Grid2D, values: Sequence[np.ndarray]) -> Field:
        return Field(np.stack([np.broadcast_to(v, grid.shape) for v in values]), self.far_field, self.names)
