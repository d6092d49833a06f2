from .base import ModelSpec, cos2_incidence, smooth_heaviside, smoothstep
from .blowup import BlowupModel, blowup_source, exact_homogeneous, psi_profile
from .conveyor import ConveyorModel, ConveyorParams
from .laser import LaserModel, LaserParams, laser_trajectory

__all__ = [
    "BlowupModel",
    "ConveyorModel",
    "ConveyorParams",
    "LaserModel",
    "LaserParams",
    "ModelSpec",
    "blowup_source",
    "cos2_incidence",
    "exact_homogeneous",
    "laser_trajectory",
    "psi_profile",
    "smooth_heaviside",
    "smoothstep",
]
