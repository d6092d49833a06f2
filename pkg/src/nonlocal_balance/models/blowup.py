"""Pure-source examples ``d_t u = (eta * u) u psi(x)`` that blow up near ``t = 1``.

``homogeneous``: ``psi = 1`` and ``u(0) = 1``; solved on a periodic grid so that
``eta * u = u`` exactly and the exact solution is ``1 / (1 - t)``.
``psi``: ``u(0) = psi`` with the compactly supported ``psi`` below, on a 1D grid.
"""

from __future__ import annotations

import numpy as np

from ..grid import ConfigurationError, Field, Grid2D
from ..kernels import BumpProfile
from .base import ModelSpec


def psi_profile(x):
    """1 on ``|x| <= 1``, ``(1 - (|x| - 1)^3)^4`` on ``1 < |x| < 2``, 0 beyond."""
    ax = np.abs(np.asarray(x, dtype=float))
    ramp = np.clip(1.0 - (ax - 1.0) ** 3, 0.0, None) ** 4
    val = np.where(ax <= 1.0, 1.0, np.where(ax < 2.0, ramp, 0.0))
    return val if val.ndim else float(val)


def blowup_source(t, x, u, conv_u, which: str = "psi"):
    if which == "homogeneous":
        return conv_u * u
    if which == "psi":
        return conv_u * u * psi_profile(x)
    raise ValueError(f"unknown blow-up variant {which!r}")


def exact_homogeneous(t):
    return 1.0 / (1.0 - np.asarray(t, dtype=float))


class BlowupModel(ModelSpec):
    names = ("u",)
    transported = (False,)
    nonlocal_kind = "convolve"
    coupling = (1.0,)

    def __init__(self, which: str = "psi", kernel: BumpProfile | None = None):
        if which not in ("homogeneous", "psi"):
            raise ConfigurationError(f"unknown blow-up variant {which!r}")
        self.which = which
        self.name = "blowup_homogeneous" if which == "homogeneous" else "blowup_psi"
        self.kernel = kernel or BumpProfile(1.0, 0.5, 3)
        self.far_field = (1.0,) if which == "homogeneous" else (0.0,)

    def flux(self, t, x1, x2, i, u, A):
        z = np.zeros(np.shape(u))
        return z, z

    def source(self, t, x1, x2, U, A):
        return np.asarray(blowup_source(t, x1, U[0], A[0], self.which))[np.newaxis]

    def wave_speed_bound(self, t: float, grid: Grid2D, field: Field) -> float:
        return 0.0

    def initial_field(self, grid: Grid2D) -> Field:
        if self.which == "homogeneous":
            return Field.constant(grid, (1.0,), self.names)
        X, _ = grid.meshgrid()
        return Field(psi_profile(X)[np.newaxis], self.far_field, self.names)
