"""Parametric surface primitives: distances, normals, UV maps, gradients.

Five types are supported: plane, cylinder, sphere, cone, torus. All distance
queries are against the unbounded surface (cones are a single nappe opening
along the axis away from the apex). Points are float64 arrays; every query
accepts a single (3,) point or an (N, 3) stack and is fully vectorized.

Conventions:
  - plane:    normal . p == offset
  - cylinder: axis is unit, `point` is any point on the axis
  - cone:     axis points from the apex into the opening, half_angle in (0, pi/2)
  - torus:    minor_radius < major_radius

Signed distances (negative inside) exist for all types; `distance` is the
absolute value, matching the reconstruction objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import SingularPoint
from .frames import AxisClass, tangent_frame

_UNIT_TOL = 1e-9
_SINGULAR_EPS = 1e-12


class PrimitiveType(str, Enum):
    PLANE = "plane"
    CYLINDER = "cylinder"
    SPHERE = "sphere"
    CONE = "cone"
    TORUS = "torus"


def _as_points(p):
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return p.reshape(1, 3), True
    return p, False


def _unit(v, name):
    v = np.asarray(v, dtype=float).reshape(3).copy()
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be unit length")
    return v


def _vec(v):
    return np.asarray(v, dtype=float).reshape(3).copy()


@dataclass(frozen=True)
class SurfacePrimitive:
    """Base class; concrete types implement the geometry queries."""

    def distance(self, p):
        d = np.abs(self.signed_distance(p))
        return d

    def signed_distance(self, p):
        raise NotImplementedError

    def normal_at(self, p):
        raise NotImplementedError

    def uv_point(self, u, v):
        raise NotImplementedError

    @property
    def type(self) -> PrimitiveType:
        return _TYPE_OF[type(self)]

    @property
    def axis_vector(self) -> Optional[np.ndarray]:
        """The direction compared against frame axes (plane: its normal)."""
        return None


@dataclass(frozen=True)
class Plane(SurfacePrimitive):
    normal: np.ndarray
    offset: float
    axis_class: Optional[AxisClass] = None

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit(self.normal, "plane normal"))
        object.__setattr__(self, "offset", float(self.offset))

    def signed_distance(self, p):
        pts, single = _as_points(p)
        d = pts @ self.normal - self.offset
        return d[0] if single else d

    def normal_at(self, p):
        pts, single = _as_points(p)
        n = np.broadcast_to(self.normal, pts.shape).copy()
        return n[0] if single else n

    def uv_point(self, u, v):
        t1, t2 = tangent_frame(self.normal)
        origin = self.normal * self.offset
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return origin + u[..., None] * t1 + v[..., None] * t2

    @property
    def axis_vector(self):
        return self.normal


@dataclass(frozen=True)
class Cylinder(SurfacePrimitive):
    axis: np.ndarray
    point: np.ndarray
    radius: float
    axis_class: Optional[AxisClass] = None

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit(self.axis, "cylinder axis"))
        object.__setattr__(self, "point", _vec(self.point))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("cylinder radius must be positive")

    def _radial(self, pts):
        u = pts - self.point
        h = u @ self.axis
        w = u - np.multiply.outer(h, self.axis)
        rho = np.linalg.norm(w, axis=1)
        return u, h, w, rho

    def signed_distance(self, p):
        pts, single = _as_points(p)
        _, _, _, rho = self._radial(pts)
        d = rho - self.radius
        return d[0] if single else d

    def normal_at(self, p):
        pts, single = _as_points(p)
        _, _, w, rho = self._radial(pts)
        if np.any(rho < _SINGULAR_EPS):
            raise SingularPoint("point on cylinder axis")
        n = w / rho[:, None]
        return n[0] if single else n

    def uv_point(self, u, v):
        t1, t2 = tangent_frame(self.axis)
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        ring = np.cos(u)[..., None] * t1 + np.sin(u)[..., None] * t2
        return self.point + self.radius * ring + v[..., None] * self.axis

    @property
    def axis_vector(self):
        return self.axis


@dataclass(frozen=True)
class Sphere(SurfacePrimitive):
    center: np.ndarray
    radius: float
    axis_class: Optional[AxisClass] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")
        if self.axis_class in (AxisClass.X, AxisClass.Y, AxisClass.Z):
            raise ValueError("spheres carry no axis class")

    def signed_distance(self, p):
        pts, single = _as_points(p)
        d = np.linalg.norm(pts - self.center, axis=1) - self.radius
        return d[0] if single else d

    def normal_at(self, p):
        pts, single = _as_points(p)
        v = pts - self.center
        r = np.linalg.norm(v, axis=1)
        if np.any(r < _SINGULAR_EPS):
            raise SingularPoint("point at sphere center")
        n = v / r[:, None]
        return n[0] if single else n

    def uv_point(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        sv, cv = np.sin(v), np.cos(v)
        dirs = np.stack([sv * np.cos(u), sv * np.sin(u), cv], axis=-1)
        return self.center + self.radius * dirs


@dataclass(frozen=True)
class Cone(SurfacePrimitive):
    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    axis_class: Optional[AxisClass] = None

    def __post_init__(self):
        object.__setattr__(self, "apex", _vec(self.apex))
        object.__setattr__(self, "axis", _unit(self.axis, "cone axis"))
        object.__setattr__(self, "half_angle", float(self.half_angle))
        if not 0.0 < self.half_angle < np.pi / 2:
            raise ValueError("cone half-angle must lie in (0, pi/2)")

    def _meridian(self, pts):
        q = pts - self.apex
        h = q @ self.axis
        w = q - np.multiply.outer(h, self.axis)
        rho = np.linalg.norm(w, axis=1)
        return q, h, w, rho

    def signed_distance(self, p):
        pts, single = _as_points(p)
        q, h, _, rho = self._meridian(pts)
        sa, ca = np.sin(self.half_angle), np.cos(self.half_angle)
        t = rho * sa + h * ca  # arc length along the generator
        f = rho * ca - h * sa  # signed offset from the generator line
        apex_side = t <= 0.0
        d = np.where(apex_side, np.linalg.norm(q, axis=1), f)
        return d[0] if single else d

    def normal_at(self, p):
        pts, single = _as_points(p)
        q, h, w, rho = self._meridian(pts)
        if np.any(rho < _SINGULAR_EPS):
            raise SingularPoint("point on cone axis")
        sa, ca = np.sin(self.half_angle), np.cos(self.half_angle)
        t = rho * sa + h * ca
        what = w / rho[:, None]
        n = ca * what - sa * self.axis
        apex_side = t <= 0.0
        if np.any(apex_side):
            qn = q / np.linalg.norm(q, axis=1)[:, None]
            n = np.where(apex_side[:, None], qn, n)
        return n[0] if single else n

    def uv_point(self, u, v):
        t1, t2 = tangent_frame(self.axis)
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        ring = np.cos(u)[..., None] * t1 + np.sin(u)[..., None] * t2
        ta = np.tan(self.half_angle)
        return self.apex + v[..., None] * (self.axis + ta * ring)

    @property
    def axis_vector(self):
        return self.axis


@dataclass(frozen=True)
class Torus(SurfacePrimitive):
    center: np.ndarray
    axis: np.ndarray
    major_radius: float
    minor_radius: float
    axis_class: Optional[AxisClass] = None

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "axis", _unit(self.axis, "torus axis"))
        object.__setattr__(self, "major_radius", float(self.major_radius))
        object.__setattr__(self, "minor_radius", float(self.minor_radius))
        if self.minor_radius <= 0 or self.major_radius <= 0:
            raise ValueError("torus radii must be positive")
        if self.minor_radius >= self.major_radius:
            raise ValueError("torus minor radius must be below the major radius")

    def _tube(self, pts):
        u = pts - self.center
        h = u @ self.axis
        w = u - np.multiply.outer(h, self.axis)
        rho = np.linalg.norm(w, axis=1)
        m = np.sqrt((rho - self.major_radius) ** 2 + h * h)
        return u, h, w, rho, m

    def signed_distance(self, p):
        pts, single = _as_points(p)
        _, _, _, _, m = self._tube(pts)
        d = m - self.minor_radius
        return d[0] if single else d

    def normal_at(self, p):
        pts, single = _as_points(p)
        _, h, w, rho, m = self._tube(pts)
        if np.any(rho < _SINGULAR_EPS) or np.any(m < _SINGULAR_EPS):
            raise SingularPoint("point on torus axis or core circle")
        what = w / rho[:, None]
        n = ((rho - self.major_radius)[:, None] * what + h[:, None] * self.axis) / m[:, None]
        return n[0] if single else n

    def uv_point(self, u, v):
        t1, t2 = tangent_frame(self.axis)
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        ring = np.cos(u)[..., None] * t1 + np.sin(u)[..., None] * t2
        rad = self.major_radius + self.minor_radius * np.cos(v)
        return (self.center + rad[..., None] * ring
                + (self.minor_radius * np.sin(v))[..., None] * self.axis)

    @property
    def axis_vector(self):
        return self.axis


_TYPE_OF = {
    Plane: PrimitiveType.PLANE,
    Cylinder: PrimitiveType.CYLINDER,
    Sphere: PrimitiveType.SPHERE,
    Cone: PrimitiveType.CONE,
    Torus: PrimitiveType.TORUS,
}


def distance(surface: SurfacePrimitive, p):
    """Euclidean distance from p to the unbounded surface."""
    return surface.distance(p)


def signed_distance(surface: SurfacePrimitive, p):
    return surface.signed_distance(p)


def normal_at(surface: SurfacePrimitive, p):
    """Outward unit normal of the surface point closest to p."""
    return surface.normal_at(p)


def uv_to_point(surface: SurfacePrimitive, u, v):
    return surface.uv_point(u, v)


def distance_gradients(surface: SurfacePrimitive, p):
    """Distance values plus analytic derivatives.

    Returns (dist, grads) where dist is (N,) and grads maps parameter names to
    arrays of per-point derivatives of the *unsigned* distance:

      'point'  (N, 3)  derivative w.r.t. the query point
      plane:    'normal' (N, 3), 'offset' (N,)
      sphere:   'center' (N, 3), 'radius' (N,)
      cylinder: 'axis' (N, 3), 'origin' (N, 3), 'radius' (N,)
      cone:     'apex' (N, 3), 'axis' (N, 3), 'half_angle' (N,)
      torus:    'center' (N, 3), 'axis' (N, 3), 'major' (N,), 'minor' (N,)

    Axis derivatives treat the axis as a free 3-vector; callers chain through
    their unit parameterization (tangent perturbation or frame rotation).
    """
    pts, _ = _as_points(p)
    n = len(pts)
    g = {}
    if isinstance(surface, Plane):
        s = pts @ surface.normal - surface.offset
        sgn = np.where(s >= 0, 1.0, -1.0)
        g["point"] = sgn[:, None] * surface.normal
        g["normal"] = sgn[:, None] * pts
        g["offset"] = -sgn
        return np.abs(s), g
    if isinstance(surface, Sphere):
        v = pts - surface.center
        r = np.maximum(np.linalg.norm(v, axis=1), _SINGULAR_EPS)
        s = r - surface.radius
        sgn = np.where(s >= 0, 1.0, -1.0)
        vhat = v / r[:, None]
        g["point"] = sgn[:, None] * vhat
        g["center"] = -sgn[:, None] * vhat
        g["radius"] = -sgn
        return np.abs(s), g
    if isinstance(surface, Cylinder):
        u, h, w, rho = surface._radial(pts)
        rho_s = np.maximum(rho, _SINGULAR_EPS)
        what = w / rho_s[:, None]
        s = rho - surface.radius
        sgn = np.where(s >= 0, 1.0, -1.0)
        g["point"] = sgn[:, None] * what
        g["origin"] = -sgn[:, None] * what
        g["axis"] = -(sgn * h)[:, None] * what
        g["radius"] = -sgn
        return np.abs(s), g
    if isinstance(surface, Cone):
        q, h, w, rho = surface._meridian(pts)
        rho_s = np.maximum(rho, _SINGULAR_EPS)
        what = w / rho_s[:, None]
        sa, ca = np.sin(surface.half_angle), np.cos(surface.half_angle)
        t = rho * sa + h * ca
        f = rho * ca - h * sa
        qn = np.maximum(np.linalg.norm(q, axis=1), _SINGULAR_EPS)
        qhat = q / qn[:, None]
        apex_side = (t <= 0.0)[:, None]
        d = np.where(apex_side[:, 0], np.linalg.norm(q, axis=1), np.abs(f))
        sgn = np.where(f >= 0, 1.0, -1.0)[:, None]
        g["point"] = np.where(apex_side, qhat, sgn * (ca * what - sa * surface.axis))
        g["apex"] = np.where(apex_side, -qhat, sgn * (sa * surface.axis - ca * what))
        g["axis"] = np.where(
            apex_side, 0.0, sgn * (-(ca * h)[:, None] * what - sa * q)
        )
        g["half_angle"] = np.where(apex_side[:, 0], 0.0, sgn[:, 0] * (-t))
        return d, g
    if isinstance(surface, Torus):
        u, h, w, rho, m = surface._tube(pts)
        rho_s = np.maximum(rho, _SINGULAR_EPS)
        m_s = np.maximum(m, _SINGULAR_EPS)
        what = w / rho_s[:, None]
        a = (rho - surface.major_radius) / m_s
        b = h / m_s
        s = m - surface.minor_radius
        sgn = np.where(s >= 0, 1.0, -1.0)
        g["point"] = sgn[:, None] * (a[:, None] * what + b[:, None] * surface.axis)
        g["center"] = -g["point"]
        g["axis"] = sgn[:, None] * (-(a * h)[:, None] * what + b[:, None] * u)
        g["major"] = -sgn * a
        g["minor"] = -sgn
        return np.abs(s), g
    raise TypeError(f"unknown primitive {type(surface)!r}")


def canonicalize(surface: SurfacePrimitive) -> SurfacePrimitive:
    """Fix the parameter gauge so equal surfaces compare equal.

    Cylinder and torus axes are sign-symmetric and get a nonnegative-z
    (tie: y, then x) direction; their axis points / centers move to the foot
    of the perpendicular from the origin (cylinders only; the torus center is
    already pinned). Plane normals flip so the offset is nonnegative (zero
    offset: the normal itself follows the sign rule). Cone axes are left
    untouched because flipping one changes the surface.
    """
    def _sign_fix(a):
        for i in (2, 1, 0):
            if abs(a[i]) > _UNIT_TOL:
                return a if a[i] > 0 else -a
        return a

    if isinstance(surface, Cylinder):
        axis = _sign_fix(surface.axis)
        foot = surface.point - (surface.point @ axis) * axis
        return Cylinder(axis, foot, surface.radius, surface.axis_class)
    if isinstance(surface, Torus):
        axis = _sign_fix(surface.axis)
        return Torus(surface.center, axis, surface.major_radius,
                     surface.minor_radius, surface.axis_class)
    if isinstance(surface, Plane):
        n, d = surface.normal, surface.offset
        if d < 0 or (d == 0 and not np.array_equal(_sign_fix(n), n)):
            n, d = -n, -d
        return Plane(n, d, surface.axis_class)
    return surface
