"""Minimal-sample primitive estimators used by RANSAC.

Sample sizes follow the usual efficient-shape-detection conventions:
plane 3 points (or 1 point + normal), sphere 2 points + normals (4 points
without normals), cylinder 2 points + normals, cone 3 points + normals,
torus 4 points + normals. All estimators reproduce exact inputs exactly
(modulo axis sign / axis-point gauge) and raise Degenerate on unusable
samples instead of returning garbage.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import Degenerate, InsufficientPoints
from .primitives import (Cone, Cylinder, Plane, PrimitiveType, Sphere,
                         SurfacePrimitive, Torus, canonicalize)

MINIMAL_SET_SIZE = {
    PrimitiveType.PLANE: 3,
    PrimitiveType.SPHERE: 2,
    PrimitiveType.CYLINDER: 2,
    PrimitiveType.CONE: 3,
    PrimitiveType.TORUS: 4,
}

NEEDS_NORMALS = {
    PrimitiveType.PLANE: False,
    PrimitiveType.SPHERE: True,  # 4-point fallback exists
    PrimitiveType.CYLINDER: True,
    PrimitiveType.CONE: True,
    PrimitiveType.TORUS: True,
}

_DEGEN_EPS = 1e-9


def _norm_rows(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n < _DEGEN_EPS):
        raise Degenerate("zero-length direction in sample")
    return v / n


def _line_least_squares_point(points, dirs):
    """Point minimizing the summed squared distance to lines (p_i, d_i)."""
    A = np.zeros((3, 3))
    b = np.zeros(3)
    for p, d in zip(points, dirs):
        P = np.eye(3) - np.outer(d, d)
        A += P
        b += P @ p
    if np.linalg.matrix_rank(A, tol=1e-9) < 3:
        raise Degenerate("normal lines do not determine a point")
    return np.linalg.solve(A, b)


def fit_plane(points, normals=None) -> Plane:
    points = np.asarray(points, dtype=float)
    if normals is not None and len(points) >= 1:
        n = _norm_rows(np.asarray(normals, dtype=float))[0]
        return Plane(n, float(n @ points[0]))
    if len(points) < 3:
        raise InsufficientPoints("plane needs 3 points or 1 point + normal")
    v1 = points[1] - points[0]
    v2 = points[2] - points[0]
    n = np.cross(v1, v2)
    nn = np.linalg.norm(n)
    if nn < _DEGEN_EPS:
        raise Degenerate("collinear plane samples")
    n /= nn
    return Plane(n, float(n @ points.mean(axis=0)))


def fit_sphere(points, normals=None) -> Sphere:
    points = np.asarray(points, dtype=float)
    if normals is not None:
        if len(points) < 2:
            raise InsufficientPoints("sphere needs 2 points + normals")
        normals = _norm_rows(np.asarray(normals, dtype=float))
        if np.linalg.norm(np.cross(normals[0], normals[1])) < _DEGEN_EPS:
            raise Degenerate("parallel sphere normals")
        center = _line_least_squares_point(points[:2], normals[:2])
        radius = float(np.mean(np.linalg.norm(points[:2] - center, axis=1)))
        if radius < _DEGEN_EPS:
            raise Degenerate("zero sphere radius")
        return Sphere(center, radius)
    if len(points) < 4:
        raise InsufficientPoints("sphere needs 4 points without normals")
    # 2 p.c + (r^2 - |c|^2) = |p|^2 is linear in (c, m).
    A = np.hstack([2.0 * points[:4], np.ones((4, 1))])
    b = np.einsum("ij,ij->i", points[:4], points[:4])
    try:
        sol = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise Degenerate("coplanar sphere samples") from exc
    center = sol[:3]
    r2 = sol[3] + center @ center
    if r2 <= _DEGEN_EPS:
        raise Degenerate("degenerate circumsphere")
    return Sphere(center, float(np.sqrt(r2)))


def fit_cylinder(points, normals) -> Cylinder:
    points = np.asarray(points, dtype=float)
    if normals is None or len(points) < 2:
        raise InsufficientPoints("cylinder needs 2 points + normals")
    normals = _norm_rows(np.asarray(normals, dtype=float))
    axis = np.cross(normals[0], normals[1])
    na = np.linalg.norm(axis)
    if na < _DEGEN_EPS:
        raise Degenerate("parallel cylinder normals")
    axis /= na
    # Work in the plane orthogonal to the axis; the projected normal lines
    # meet at the axis point.
    P = np.eye(3) - np.outer(axis, axis)
    pp = points[:2] @ P.T
    nn = normals[:2] @ P.T
    nn = _norm_rows(nn)
    A = np.outer(axis, axis).copy()
    b = np.zeros(3)
    for p, d in zip(pp, nn):
        M = np.eye(3) - np.outer(d, d)
        A += M
        b += M @ p
    try:
        origin = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise Degenerate("cylinder normal lines do not intersect") from exc
    radius = float(np.mean(np.linalg.norm(pp - origin, axis=1)))
    if radius < _DEGEN_EPS:
        raise Degenerate("zero cylinder radius")
    return canonicalize(Cylinder(axis, origin, radius))


def fit_cone(points, normals) -> Cone:
    points = np.asarray(points, dtype=float)
    if normals is None or len(points) < 3:
        raise InsufficientPoints("cone needs 3 points + normals")
    normals = _norm_rows(np.asarray(normals, dtype=float))
    N = normals[:3]
    d = np.einsum("ij,ij->i", N, points[:3])
    if abs(np.linalg.det(N)) < _DEGEN_EPS:
        raise Degenerate("cone tangent planes do not intersect in a point")
    apex = np.linalg.solve(N, d)
    rel = points[:3] - apex
    lens = np.linalg.norm(rel, axis=1)
    if np.any(lens < _DEGEN_EPS):
        raise Degenerate("sample at cone apex")
    dirs = rel / lens[:, None]
    axis = np.cross(dirs[1] - dirs[0], dirs[2] - dirs[0])
    na = np.linalg.norm(axis)
    if na < _DEGEN_EPS:
        raise Degenerate("cone sample directions are collinear")
    axis /= na
    if axis @ dirs.mean(axis=0) < 0:
        axis = -axis
    cosines = np.clip(dirs @ axis, -1.0, 1.0)
    half_angle = float(np.mean(np.arccos(cosines)))
    if not 1e-6 < half_angle < np.pi / 2 - 1e-6:
        raise Degenerate("estimated cone half-angle out of range")
    return Cone(apex, axis, half_angle)


def _plucker(p, d):
    return np.concatenate([d, np.cross(p, d)])


def _reciprocal(a, b):
    return a[:3] @ b[3:] + b[:3] @ a[3:]


def fit_torus(points, normals) -> Torus:
    """Torus from 4 points + normals.

    Every torus surface normal line crosses the rotation axis, so the axis is
    a common transversal of the four normal lines. In Plücker coordinates the
    transversal condition is linear; the null space is generically a pencil,
    and the Plücker quadric selects up to two real lines from it. Each
    candidate axis yields radii via a least-squares circle in the meridian
    half-plane; the candidate with the smallest residual wins.
    """
    points = np.asarray(points, dtype=float)
    if normals is None or len(points) < 4:
        raise InsufficientPoints("torus needs 4 points + normals")
    normals = _norm_rows(np.asarray(normals, dtype=float))
    L = [_plucker(p, n) for p, n in zip(points[:4], normals[:4])]
    M = np.array([np.concatenate([l[3:], l[:3]]) for l in L])
    _, sv, vt = np.linalg.svd(M)
    if sv[3] < 1e-9 * max(sv[0], 1.0):
        # Rank-deficient conditions (e.g. concurrent normal lines) leave more
        # than a pencil of transversals; the torus is not determined.
        raise Degenerate("torus normal lines are in degenerate position")
    A, B = vt[4], vt[5]
    qa = _reciprocal(A, A)
    qb = _reciprocal(A, B)
    qc = _reciprocal(B, B)
    # Solve qa t^2 + 2 qb t + qc = 0 for T = t A + B (plus the t -> inf root A).
    cands = []
    if abs(qa) < 1e-14:
        cands.append(A)
        if abs(qb) > 1e-14:
            cands.append((-qc / (2 * qb)) * A + B)
    else:
        disc = qb * qb - qa * qc
        if disc < 0:
            raise Degenerate("torus transversal has no real solutions")
        for t in ((-qb + np.sqrt(disc)) / qa, (-qb - np.sqrt(disc)) / qa):
            cands.append(t * A + B)

    best = None
    for T in cands:
        d = T[:3]
        nd = np.linalg.norm(d)
        if nd < _DEGEN_EPS:
            continue
        d = d / nd
        m = T[3:] / nd
        x0 = np.cross(d, m)  # closest point to the origin on the line
        rel = points[:4] - x0
        h = rel @ d
        rho = np.linalg.norm(rel - np.outer(h, d), axis=1)
        # Circle fit in (rho, h): rho^2 + h^2 = 2 R rho + 2 h0 h + k.
        G = np.stack([2 * rho, 2 * h, np.ones(4)], axis=1)
        y = rho * rho + h * h
        sol, *_ = np.linalg.lstsq(G, y, rcond=None)
        R, h0, k = sol
        r2 = k + R * R + h0 * h0
        if R <= _DEGEN_EPS or r2 <= _DEGEN_EPS:
            continue
        r = np.sqrt(r2)
        if r >= R:
            continue
        resid = np.max(np.abs(np.sqrt((rho - R) ** 2 + (h - h0) ** 2) - r))
        if best is None or resid < best[0]:
            best = (resid, d, x0 + h0 * d, R, r)
    if best is None:
        raise Degenerate("no valid torus for the sample")
    _, axis, center, R, r = best
    return canonicalize(Torus(center, axis, R, r))


def fit_minimal(ptype: PrimitiveType, points, normals=None) -> SurfacePrimitive:
    """Dispatch to the per-type minimal estimator."""
    ptype = PrimitiveType(ptype)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if ptype is PrimitiveType.PLANE:
        if len(points) >= 3:
            return fit_plane(points)
        return fit_plane(points, normals)
    if ptype is PrimitiveType.SPHERE:
        return fit_sphere(points, normals)
    if ptype is PrimitiveType.CYLINDER:
        return fit_cylinder(points, normals)
    if ptype is PrimitiveType.CONE:
        return fit_cone(points, normals)
    if ptype is PrimitiveType.TORUS:
        return fit_torus(points, normals)
    raise ValueError(f"unknown primitive type {ptype!r}")
