"""Axis-angle rotations and unit-vector reparameterizations.

All optimization stages keep unit vectors unit-length by construction:
axis-labeled directions are functions of a single shared axis-angle rotation,
and free directions are perturbations of a base direction inside its tangent
plane. Both forms come with exact tangent maps so solvers can use analytic
Jacobians.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidAxisClass

_EPS_ANGLE = 1e-8


class AxisClass(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    UNALIGNED = "unaligned"


_CANONICAL = {
    AxisClass.X: np.array([1.0, 0.0, 0.0]),
    AxisClass.Y: np.array([0.0, 1.0, 0.0]),
    AxisClass.Z: np.array([0.0, 0.0, 1.0]),
}


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x such that skew(v) @ w == cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def rotation_matrix(omega: np.ndarray) -> np.ndarray:
    """Rodrigues rotation matrix for an axis-angle vector (angle * unit axis)."""
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega)
    K = skew(omega)
    if theta < _EPS_ANGLE:
        # Series: sin(t)/t -> 1 - t^2/6, (1-cos(t))/t^2 -> 1/2 - t^2/24
        a = 1.0 - theta * theta / 6.0
        b = 0.5 - theta * theta / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / (theta * theta)
    return np.eye(3) + a * K + b * (K @ K)


def right_jacobian(omega: np.ndarray) -> np.ndarray:
    """Right Jacobian of SO(3): Exp(omega + d) ~= Exp(omega) Exp(Jr(omega) d)."""
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega)
    K = skew(omega)
    if theta < _EPS_ANGLE:
        b = 0.5 - theta * theta / 24.0
        c = 1.0 / 6.0 - theta * theta / 120.0
    else:
        b = (1.0 - np.cos(theta)) / (theta * theta)
        c = (theta - np.sin(theta)) / (theta ** 3)
    return np.eye(3) - b * K + c * (K @ K)


def rotate(omega: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the axis-angle rotation to a vector (or row-stack of vectors)."""
    R = rotation_matrix(omega)
    v = np.asarray(v, dtype=float)
    return v @ R.T if v.ndim == 2 else R @ v


def rotate_jacobian(omega: np.ndarray, v: np.ndarray) -> np.ndarray:
    """d(R(omega) v)/d omega as a 3x3 matrix, exact for any omega."""
    R = rotation_matrix(omega)
    return -R @ skew(np.asarray(v, dtype=float)) @ right_jacobian(omega)


def rotvec_from_matrix(R: np.ndarray) -> np.ndarray:
    """Axis-angle vector of a rotation matrix, magnitude in [0, pi]."""
    from scipy.spatial.transform import Rotation

    return Rotation.from_matrix(np.asarray(R, dtype=float)).as_rotvec()


def wrap_rotvec(omega: np.ndarray) -> np.ndarray:
    """Wrap an axis-angle vector so its magnitude lies in [0, pi]."""
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega)
    if theta <= np.pi or theta < _EPS_ANGLE:
        return omega
    # R(theta * k) == R((theta - 2 pi n) * k); bring the angle into [-pi, pi].
    wrapped = np.mod(theta + np.pi, 2.0 * np.pi) - np.pi
    return omega * (wrapped / theta)


def tangent_frame(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair (n, b) spanning the plane orthogonal to a.

    Picks the canonical axis least parallel to `a` (lowest index on ties) and
    Gram-Schmidt orthogonalizes it.
    """
    a = np.asarray(a, dtype=float)
    i = int(np.argmin(np.abs(a)))
    e = np.zeros(3)
    e[i] = 1.0
    n = e - (e @ a) * a
    n /= np.linalg.norm(n)
    b = np.cross(a, n)
    b /= np.linalg.norm(b)
    return n, b


@dataclass(frozen=True)
class AlignmentFrame:
    """Shared orthonormal frame, encoded as a single axis-angle rotation."""

    rotation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float).reshape(3).copy()
        object.__setattr__(self, "rotation", rot)
        if np.linalg.norm(rot) > np.pi + 1e-9:
            raise ValueError("axis-angle magnitude must lie in [0, pi]")

    def matrix(self) -> np.ndarray:
        return rotation_matrix(self.rotation)

    def axis(self, axis_class: AxisClass) -> np.ndarray:
        return frame_axis(self.rotation, axis_class)


def frame_axis(rotation: np.ndarray, axis_class: AxisClass) -> np.ndarray:
    """Rotated canonical axis for an aligned axis class.

    Raises InvalidAxisClass for the unaligned class, which has no frame axis.
    """
    axis_class = AxisClass(axis_class)
    if axis_class is AxisClass.UNALIGNED:
        raise InvalidAxisClass("unaligned primitives have no frame axis")
    return rotate(np.asarray(rotation, dtype=float), _CANONICAL[axis_class])


def frame_axis_jacobian(rotation: np.ndarray, axis_class: AxisClass) -> np.ndarray:
    """d frame_axis / d rotation, 3x3."""
    axis_class = AxisClass(axis_class)
    if axis_class is AxisClass.UNALIGNED:
        raise InvalidAxisClass("unaligned primitives have no frame axis")
    return rotate_jacobian(np.asarray(rotation, dtype=float), _CANONICAL[axis_class])


@dataclass(frozen=True)
class TangentPerturbation:
    """Unit vector parameterized by two in-tangent-plane coordinates.

    The evaluated direction is normalize(base + u*n + v*b) with (n, b) the
    fixed tangent frame of the base direction, so it stays unit length for any
    finite (u, v) without renormalization constraints in the solver.
    """

    base: np.ndarray
    u: float = 0.0
    v: float = 0.0
    n: np.ndarray = None
    b: np.ndarray = None

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float).reshape(3).copy()
        nrm = np.linalg.norm(base)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError("base direction must be unit length")
        object.__setattr__(self, "base", base)
        if self.n is None or self.b is None:
            n, b = tangent_frame(base)
        else:
            n = np.asarray(self.n, dtype=float).reshape(3).copy()
            b = np.asarray(self.b, dtype=float).reshape(3).copy()
        for pair in ((n, b), (n, base), (b, base)):
            if abs(pair[0] @ pair[1]) > 1e-9:
                raise ValueError("tangent frame must be pairwise orthogonal")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "b", b)


def perturb_unit(t: TangentPerturbation) -> np.ndarray:
    """Evaluate the perturbed unit direction."""
    w = t.base + t.u * t.n + t.v * t.b
    return w / np.linalg.norm(w)


def perturb_unit_jacobian(t: TangentPerturbation) -> np.ndarray:
    """d perturb_unit / d (u, v) as a 3x2 matrix."""
    w = t.base + t.u * t.n + t.v * t.b
    nw = np.linalg.norm(w)
    a = w / nw
    du = (t.n - a * (a @ t.n)) / nw
    dv = (t.b - a * (a @ t.b)) / nw
    return np.stack([du, dv], axis=1)
