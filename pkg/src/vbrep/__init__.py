"""View-centric boundary representation reconstruction from single depth views."""

from .frames import (AlignmentFrame, AxisClass, TangentPerturbation,
                     frame_axis, perturb_unit)
from .primitives import (Cone, Cylinder, Plane, PrimitiveType, Sphere,
                         SurfacePrimitive, Torus, distance, normal_at,
                         uv_to_point)

__version__ = "0.1.0"

__all__ = [
    "AlignmentFrame", "AxisClass", "TangentPerturbation", "frame_axis",
    "perturb_unit", "Cone", "Cylinder", "Plane", "PrimitiveType", "Sphere",
    "SurfacePrimitive", "Torus", "distance", "normal_at", "uv_to_point",
    "__version__",
]
