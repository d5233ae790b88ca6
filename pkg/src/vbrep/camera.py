"""Pinhole camera model, depth unprojection, and Sobel normal estimation.

Pixel (x, y) = (column, row) with the camera at the origin looking along +z.
Depth rasters hold z-depth per pixel in scene units with NaN marking invalid
pixels. A view ray through a (possibly subpixel) position is the unit-depth
image-plane point v = ((x-cx)/fx, (y-cy)/fy, 1); the 3D point at depth s is
s * v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

# d/dx and d/dy Sobel kernels, normalized so a linear ramp gives its slope.
_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float) / 8.0
_SOBEL_Y = _SOBEL_X.T


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the raster")


@dataclass(frozen=True)
class PointCloud:
    """Unprojected depth samples with their source pixels (x, y)."""

    points: np.ndarray  # (N, 3)
    pixels: np.ndarray  # (N, 2) int

    def __len__(self):
        return len(self.points)


def validate_depth(depth: np.ndarray, camera: CameraIntrinsics) -> np.ndarray:
    depth = np.asarray(depth, dtype=float)
    if depth.shape != (camera.height, camera.width):
        raise DimensionMismatch(
            f"depth raster {depth.shape} does not match camera "
            f"{(camera.height, camera.width)}"
        )
    return depth


def view_ray(xy, camera: CameraIntrinsics) -> np.ndarray:
    """Unit-depth image-plane point(s) for pixel position(s) (x, y)."""
    xy = np.asarray(xy, dtype=float)
    x = (xy[..., 0] - camera.cx) / camera.fx
    y = (xy[..., 1] - camera.cy) / camera.fy
    return np.stack([x, y, np.ones_like(x)], axis=-1)


def project(points, camera: CameraIntrinsics) -> np.ndarray:
    """Pixel coordinates (x, y) of 3D points; z must be positive."""
    points = np.asarray(points, dtype=float)
    x = points[..., 0] / points[..., 2] * camera.fx + camera.cx
    y = points[..., 1] / points[..., 2] * camera.fy + camera.cy
    return np.stack([x, y], axis=-1)


def unproject(depth: np.ndarray, camera: CameraIntrinsics) -> PointCloud:
    """Frontal point cloud from every valid depth pixel."""
    depth = validate_depth(depth, camera)
    ys, xs = np.nonzero(np.isfinite(depth))
    d = depth[ys, xs]
    rays = view_ray(np.stack([xs, ys], axis=-1), camera)
    pts = d[:, None] * rays
    return PointCloud(points=pts, pixels=np.stack([xs, ys], axis=-1))


def _correlate3(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = np.zeros_like(img)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            w = kernel[dy + 1, dx + 1]
            if w == 0.0:
                continue
            out[1:-1, 1:-1] += w * img[1 + dy:img.shape[0] - 1 + dy,
                                       1 + dx:img.shape[1] - 1 + dx]
    return out


def estimate_normals(depth: np.ndarray, camera: CameraIntrinsics) -> np.ndarray:
    """Per-pixel unit normals from Sobel depth gradients.

    The pixel-space gradients are pushed through the exact perspective
    unprojection Jacobian, so normals are correct for tilted surfaces away
    from the image center. Normals are oriented toward the camera
    (n . view_ray < 0). Pixels whose 3x3 stencil touches invalid depth (or
    the raster border) get NaN.
    """
    depth = validate_depth(depth, camera)
    h, w = depth.shape
    finite = np.isfinite(depth)
    z = np.where(finite, depth, 0.0)
    gx = _correlate3(z, _SOBEL_X)
    gy = _correlate3(z, _SOBEL_Y)

    valid = np.zeros_like(finite)
    valid[1:-1, 1:-1] = True
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            valid[1:-1, 1:-1] &= finite[1 + dy:h - 1 + dy, 1 + dx:w - 1 + dx]

    xs = (np.arange(w) - camera.cx) / camera.fx
    ys = (np.arange(h) - camera.cy) / camera.fy
    u, v = np.meshgrid(xs, ys)
    # Surface P(x, y) = z(x, y) * (u, v, 1):
    #   dP/dx = z_x (u, v, 1) + z (1/fx, 0, 0)
    #   dP/dy = z_y (u, v, 1) + z (0, 1/fy, 0)
    tx = np.stack([gx * u + z / camera.fx, gx * v, gx], axis=-1)
    ty = np.stack([gy * u, gy * v + z / camera.fy, gy], axis=-1)
    n = np.cross(tx, ty)
    norm = np.linalg.norm(n, axis=-1)
    good = valid & (norm > 1e-15)
    n = np.where(good[..., None], n / np.where(norm > 1e-15, norm, 1.0)[..., None], np.nan)
    rays = np.stack([u, v, np.ones_like(u)], axis=-1)
    flip = np.einsum("...i,...i->...", n, rays) > 0
    n = np.where((good & flip)[..., None], -n, n)
    return n
