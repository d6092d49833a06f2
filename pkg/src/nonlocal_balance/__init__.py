"""Finite-volume simulation of nonlocal systems of balance laws in 2D."""

from .diagnostics import RunRecord
from .grid import ConfigurationError, Field, Grid2D, integrate, l1_norm, linf_norm, make_grid, total_variation
from .kernels import BumpProfile, KernelStencil, convolve, convolved_gradient, discretize_kernel, eval_bump
from .solver import BlowUp, Solver, SolverConfig, State, run

__version__ = "0.1.0"

__all__ = [
    "BlowUp",
    "BumpProfile",
    "ConfigurationError",
    "Field",
    "Grid2D",
    "KernelStencil",
    "RunRecord",
    "Solver",
    "SolverConfig",
    "State",
    "convolve",
    "convolved_gradient",
    "discretize_kernel",
    "eval_bump",
    "integrate",
    "l1_norm",
    "linf_norm",
    "make_grid",
    "run",
    "total_variation",
]
