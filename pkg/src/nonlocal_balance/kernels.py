"""Compactly supported radial kernels and the convolutions built on them.

The nonlocal term of every model is either ``eta * u`` or
``grad(eta * v) = (grad eta) * v`` for a linear combination ``v`` of the
components.  Both are evaluated on the grid by a discrete convolution with a
sampled stencil; the exterior of the grid is filled with the far-field value
(or wrapped, for periodic grids).

Two evaluation paths are provided and must agree: a direct sum over stencil
offsets and an FFT product.  The FFT path is the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
import scipy.fft

from .grid import ConfigurationError, Field, Grid2D


@dataclass(frozen=True)
class BumpProfile:
    """``a * (1 - (s/r)**2)**p`` on ``|s| <= r``, zero outside."""

    amplitude: float
    radius: float
    exponent: int

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ConfigurationError(f"bump radius must be positive, got {self.radius}")
        if int(self.exponent) != self.exponent or self.exponent < 2:
            raise ConfigurationError(f"bump exponent must be an integer >= 2, got {self.exponent}")

    def __call__(self, s):
        return eval_bump(self, s)

    def radial_slope_over_s(self, s):
        """``W'(s) / s``, so that ``grad W(|x|) = radial_slope_over_s(|x|) * x``."""
        s = np.asarray(s, dtype=float)
        q = 1.0 - (s / self.radius) ** 2
        inside = np.abs(s) <= self.radius
        val = np.where(
            inside,
            -2.0 * self.amplitude * self.exponent * np.clip(q, 0.0, None) ** (self.exponent - 1)
            / self.radius**2,
            0.0,
        )
        return val if val.ndim else float(val)

    def derivative(self, s):
        return self.radial_slope_over_s(s) * np.asarray(s, dtype=float)


def eval_bump(profile: BumpProfile, s):
    s = np.asarray(s, dtype=float)
    q = 1.0 - (s / profile.radius) ** 2
    val = np.where(np.abs(s) <= profile.radius, profile.amplitude * np.clip(q, 0.0, None) ** profile.exponent, 0.0)
    return val if val.ndim else float(val)


@dataclass(frozen=True, eq=False)
class KernelStencil:
    """Sampled kernel on the offsets ``(di, dj)``, ``|di| <= rx``, ``|dj| <= ry``.

    ``weights[rx + di, ry + dj]`` holds the (rescaled) kernel value at
    ``(di*dx, dj*dy)``; ``grad_weights[k]`` holds its ``x_{k+1}``-derivative,
    rescaled by the same factor.
    """

    rx: int
    ry: int
    dx: float
    dy: float
    weights: np.ndarray
    grad_weights: np.ndarray
    _spectra: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def mass(self) -> float:
        return float(self.weights.sum() * self.dx * self.dy)


def discretize_kernel(profile: BumpProfile, dx: float, dy: float, one_d: bool = False) -> KernelStencil:
    """Sample ``profile(|x|)`` at cell offsets and rescale to unit discrete mass.

    With ``one_d`` the stencil has no extent along ``x2``.
    """
    r = profile.radius
    if r < dx or (not one_d and r < dy):
        raise ConfigurationError(
            f"kernel radius {r} is smaller than one cell (dx={dx}, dy={dy})"
        )
    rx = math.ceil(r / dx - 1e-12)
    ry = 0 if one_d else math.ceil(r / dy - 1e-12)
    ox = np.arange(-rx, rx + 1) * dx
    oy = np.arange(-ry, ry + 1) * dy
    X, Y = np.meshgrid(ox, oy, indexing="ij")
    dist = np.sqrt(X**2 + Y**2)
    raw = np.asarray(eval_bump(profile, dist))
    slope = np.asarray(profile.radial_slope_over_s(dist))
    scale = 1.0 / (raw.sum() * dx * dy)
    weights = raw * scale
    grad = np.stack([slope * X, slope * Y]) * scale
    if one_d:
        grad[1] = 0.0
    weights.setflags(write=False)
    grad.setflags(write=False)
    return KernelStencil(rx, ry, dx, dy, weights, grad)


def _extend(u: np.ndarray, rx: int, ry: int, far_field: float, periodic: bool) -> np.ndarray:
    if periodic:
        return np.pad(u, ((rx, rx), (ry, ry)), mode="wrap")
    return np.pad(u, ((rx, rx), (ry, ry)), mode="constant", constant_values=far_field)


def _direct(padded: np.ndarray, kern: np.ndarray, nx: int, ny: int) -> np.ndarray:
    rx = (kern.shape[0] - 1) // 2
    ry = (kern.shape[1] - 1) // 2
    out = np.zeros((nx, ny))
    for a, b in zip(*np.nonzero(kern)):
        di, dj = a - rx, b - ry
        out += kern[a, b] * padded[rx - di : rx - di + nx, ry - dj : ry - dj + ny]
    return out


def _spectrum(stencil: KernelStencil, which: str, shape: tuple[int, int]) -> np.ndarray:
    key = (which, shape)
    spec = stencil._spectra.get(key)
    if spec is None:
        kern = stencil.weights if which == "w" else stencil.grad_weights[int(which[1])]
        spec = scipy.fft.rfft2(kern, s=shape)
        if len(stencil._spectra) > 32:
            stencil._spectra.clear()
        stencil._spectra[key] = spec
    return spec


def _fft_many(padded: np.ndarray, stencil: KernelStencil, which: Sequence[str], nx: int, ny: int) -> list[np.ndarray]:
    shape = (
        scipy.fft.next_fast_len(padded.shape[0], real=True),
        scipy.fft.next_fast_len(padded.shape[1], real=True),
    )
    P = scipy.fft.rfft2(padded, s=shape)
    rx, ry = stencil.rx, stencil.ry
    out = []
    for w in which:
        full = scipy.fft.irfft2(P * _spectrum(stencil, w, shape), s=shape)
        out.append(full[2 * rx : 2 * rx + nx, 2 * ry : 2 * ry + ny])
    return out


def convolve(
    u: np.ndarray,
    stencil: KernelStencil,
    grid: Grid2D,
    far_field: float = 0.0,
    method: str = "fft",
) -> np.ndarray:
    """``(eta * u)`` at every cell; reads outside the grid return ``far_field``."""
    u = np.asarray(u, dtype=float)
    area = grid.dx * grid.dy
    if grid.periodic:
        base, shift = u, 0.0
    else:
        # convolving u - far_field keeps constants exact: mass is 1 by construction
        base, shift = u - far_field, far_field
    padded = _extend(base, stencil.rx, stencil.ry, 0.0, grid.periodic)
    if method == "direct":
        res = _direct(padded, stencil.weights, grid.nx, grid.ny)
    elif method == "fft":
        (res,) = _fft_many(padded, stencil, ["w"], grid.nx, grid.ny)
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return res * area + shift


def convolved_gradient(
    field: Field,
    coefficients: Sequence[float],
    stencil: KernelStencil,
    grid: Grid2D,
    method: str = "fft",
) -> np.ndarray:
    """``grad(eta * v)`` with ``v = sum_k c_k u_k``, shape ``(2, nx, ny)``."""
    v = np.zeros(grid.shape)
    ff = 0.0
    for k, c in enumerate(coefficients):
        if c:
            v += c * field.values[k]
            ff += c * field.far_field[k]
    if not grid.periodic:
        v -= ff
    padded = _extend(v, stencil.rx, stencil.ry, 0.0, grid.periodic)
    area = grid.dx * grid.dy
    if method == "direct":
        parts = [_direct(padded, stencil.grad_weights[k], grid.nx, grid.ny) for k in range(2)]
    elif method == "fft":
        which = ["g0"] if grid.is_1d else ["g0", "g1"]
        parts = _fft_many(padded, stencil, which, grid.nx, grid.ny)
        if grid.is_1d:
            parts.append(np.zeros(grid.shape))
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return np.stack(parts) * area
