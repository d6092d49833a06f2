"""Cargo density on a conveyor belt ``B = [0, L] x [-ell, ell]``.

The belt carries the cargo downstream; a field ``b`` acting in a layer of
width ``delta`` along both sides pushes it back inwards, and above the
maximal density the cargo drifts towards lower averaged density.  Cargo is
poured in ``R_in = [0, a] x [-ell, ell]`` and removed in
``R_out = [L - a, L] x [-ell, ell]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from ..diagnostics import outside_mass_fraction
from ..grid import ConfigurationError, Field, Grid2D
from ..kernels import BumpProfile
from .base import SMOOTHSTEP_MAX_SLOPE, ModelSpec, smooth_heaviside, smoothstep


@dataclass
class ConveyorParams:
    ell: float = 1.0
    length: float = 10.0
    delta: float = 0.3
    eps: float = 0.5
    eps_hat: float = 1.0
    mu: float = 0.05
    rho_max: float = 1.0
    v_belt: float = 1.0
    a: float = 1.0
    q_in: float = 2.0
    q_out: float = 5.0
    kappa: float = 0.1
    # exponent of the (1 - xi^2)^p factors of the inflow/outflow bumps
    bump_exponent: int = 8
    kernel: BumpProfile = dc_field(default_factory=lambda: BumpProfile(1.0, 0.5, 3))

    def __post_init__(self) -> None:
        for key in ("ell", "length", "delta", "eps", "mu", "rho_max", "kappa"):
            if not getattr(self, key) > 0:
                raise ConfigurationError(f"{key} must be positive, got {getattr(self, key)}")
        if not self.eps_hat > self.eps:
            raise ConfigurationError(f"eps_hat ({self.eps_hat}) must exceed eps ({self.eps})")
        if not 0 < self.a < self.length / 2:
            raise ConfigurationError(f"need 0 < a < length/2, got a={self.a}")
        if self.v_belt < 0 or self.q_in < 0 or self.q_out < 0:
            raise ConfigurationError("v_belt, q_in and q_out must be nonnegative")
        if int(self.bump_exponent) != self.bump_exponent or self.bump_exponent < 3:
            raise ConfigurationError("bump_exponent must be an integer >= 3")
        if not 2 * self.delta < 2 * self.ell:
            raise ConfigurationError("delta must be smaller than ell")


def _side_profile(s):
    """1 at ``s = 0``, 0 for ``|s| >= 1``, C2 (flat) at ``s = 0``."""
    return 1.0 - smoothstep(np.abs(s))


def _box_bump(x, lo, hi, p):
    """``(1 - xi^2)^p`` with ``xi`` mapping ``[lo, hi]`` onto ``[-1, 1]``."""
    xi = (2.0 * np.asarray(x, dtype=float) - (lo + hi)) / (hi - lo)
    return np.where(np.abs(xi) < 1.0, np.clip(1.0 - xi * xi, 0.0, None) ** p, 0.0)


class ConveyorModel(ModelSpec):
    name = "conveyor"
    names = ("rho",)
    far_field = (0.0,)
    transported = (True,)
    nonlocal_kind = "gradient"
    coupling = (1.0,)

    def __init__(self, params: ConveyorParams | None = None):
        self.params = params or ConveyorParams()
        self.kernel = self.params.kernel

    @property
    def belt(self) -> tuple[float, float, float, float]:
        p = self.params
        return (0.0, p.length, -p.ell, p.ell)

    def _x1_cutoff(self, x1):
        p = self.params
        x1 = np.asarray(x1, dtype=float)
        left = smoothstep((x1 + p.delta) / p.delta)
        right = 1.0 - smoothstep((x1 - p.length) / p.delta)
        return left * right

    def boundary_repulsion(self, x1, x2):
        p = self.params
        x2 = np.asarray(x2, dtype=float)
        b2 = p.eps_hat * (_side_profile((x2 + p.ell) / p.delta) - _side_profile((x2 - p.ell) / p.delta))
        b2 = b2 * self._x1_cutoff(x1)
        return np.zeros_like(b2), b2

    def stationary_velocity(self, x1, x2):
        p = self.params
        x1 = np.asarray(x1, dtype=float)
        v1 = p.v_belt * (1.0 - smoothstep((x1 - (p.length - p.a)) / p.a))
        return v1 + 0.0 * np.asarray(x2, dtype=float), np.zeros(np.broadcast(x1, x2).shape)

    def velocity(self, x1, x2):
        s1, s2 = self.stationary_velocity(x1, x2)
        b1, b2 = self.boundary_repulsion(x1, x2)
        return s1 + b1, s2 + b2

    def cargo_flux(self, t, x1, x2, rho, A):
        p = self.params
        v1, v2 = self.velocity(x1, x2)
        A = np.asarray(A, dtype=float)
        drift = smooth_heaviside(rho - p.rho_max, p.mu) * p.eps / np.sqrt(1.0 + A[0] ** 2 + A[1] ** 2)
        return rho * (v1 - drift * A[0]), rho * (v2 - drift * A[1])

    def inflow_shape(self, x1, x2):
        p = self.params
        return _box_bump(x1, 0.0, p.a, p.bump_exponent) * _box_bump(x2, -p.ell, p.ell, p.bump_exponent)

    def outflow_shape(self, x1, x2):
        p = self.params
        return _box_bump(x1, p.length - p.a, p.length, p.bump_exponent) * _box_bump(
            x2, -p.ell, p.ell, p.bump_exponent
        )

    def outflow_saturation(self, rho):
        k = self.params.kappa
        rho = np.asarray(rho, dtype=float)
        return np.where(rho <= 0.0, 0.0, rho * smoothstep(rho / k))

    def cargo_source(self, t, x1, x2, rho):
        p = self.params
        psi_in = p.q_in * self.inflow_shape(x1, x2)
        psi_out = p.q_out * self.outflow_shape(x1, x2) * self.outflow_saturation(rho)
        val = psi_in - psi_out
        return val if np.ndim(val) else float(val)

    def flux(self, t, x1, x2, i, u, A):
        return self.cargo_flux(t, x1, x2, u, A)

    def source(self, t, x1, x2, U, A):
        return np.asarray(self.cargo_source(t, x1, x2, U[0]))[np.newaxis]

    def wave_speed_bound(self, t: float, grid: Grid2D, field: Field) -> float:
        p = self.params
        rho = float(np.max(np.abs(field.values[0])))
        dH = SMOOTHSTEP_MAX_SLOPE / (2.0 * p.mu)
        return float(p.v_belt + p.eps_hat + p.eps * (1.0 + rho * dH))

    def initial_field(self, grid: Grid2D) -> Field:
        return Field.constant(grid, (0.0,), self.names)

    def metrics(self, t: float, grid: Grid2D, field: Field) -> dict[str, float]:
        rho = field.values[0]
        return {
            "outside_mass_fraction": outside_mass_fraction(rho, grid, self.belt),
            "min_rho": float(rho.min()),
        }
