"""Bundle file formats: binary rasters, JSON sidecars, OBJ export.

Depth rasters (.vbrd): 16-byte header (magic "VBRD", u32 LE width, u32 LE
height, u32 LE flags=0) followed by row-major f32 LE values, NaN = invalid.
Instance rasters (.vbri): same header with magic "VBRI", values u16 LE,
0 = background. Everything else is JSON.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .camera import CameraIntrinsics
from .errors import InputMissing
from .frames import AxisClass
from .primitives import (Cone, Cylinder, Plane, PrimitiveType, Sphere,
                         SurfacePrimitive, Torus)

_HEADER = struct.Struct("<4sIII")


def _write_raster(path, magic: bytes, array: np.ndarray, dtype) -> None:
    array = np.ascontiguousarray(array, dtype=dtype)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, array.shape[1], array.shape[0], 0))
        fh.write(array.tobytes())


def _read_raster(path, magic: bytes, dtype) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise InputMissing(str(path))
    raw = path.read_bytes()
    tag, width, height, _flags = _HEADER.unpack_from(raw)
    if tag != magic:
        raise ValueError(f"{path}: bad magic {tag!r}, expected {magic!r}")
    data = np.frombuffer(raw, dtype=dtype, offset=_HEADER.size,
                         count=width * height)
    return data.reshape(height, width).copy()


def write_depth(path, depth: np.ndarray) -> None:
    _write_raster(path, b"VBRD", depth, "<f4")


def read_depth(path) -> np.ndarray:
    return _read_raster(path, b"VBRD", "<f4")


def write_instance_map(path, ids: np.ndarray) -> None:
    _write_raster(path, b"VBRI", ids, "<u2")


def read_instance_map(path) -> np.ndarray:
    return _read_raster(path, b"VBRI", "<u2")


def _to_plain(obj):
    if isinstance(obj, np.ndarray):
        return [_to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_to_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise InputMissing(str(path))
    with open(path) as fh:
        return json.load(fh)


def write_camera(path, camera: CameraIntrinsics) -> None:
    write_json(path, {
        "fx": camera.fx, "fy": camera.fy,
        "cx": camera.cx, "cy": camera.cy,
        "width": camera.width, "height": camera.height,
    })


def read_camera(path) -> CameraIntrinsics:
    d = read_json(path)
    return CameraIntrinsics(fx=d["fx"], fy=d["fy"], cx=d["cx"], cy=d["cy"],
                            width=int(d["width"]), height=int(d["height"]))


def primitive_to_json(s: SurfacePrimitive) -> dict:
    out = {"type": s.type.value}
    if getattr(s, "axis_class", None) is not None:
        out["axis_class"] = AxisClass(s.axis_class).value
    if isinstance(s, Plane):
        out.update(normal=s.normal, offset=s.offset)
    elif isinstance(s, Cylinder):
        out.update(axis=s.axis, point=s.point, radius=s.radius)
    elif isinstance(s, Sphere):
        out.update(center=s.center, radius=s.radius)
    elif isinstance(s, Cone):
        out.update(apex=s.apex, axis=s.axis, half_angle=s.half_angle)
    elif isinstance(s, Torus):
        out.update(center=s.center, axis=s.axis,
                   major_radius=s.major_radius, minor_radius=s.minor_radius)
    else:
        raise TypeError(f"unknown primitive {type(s)!r}")
    return _to_plain(out)


def primitive_from_json(d: dict) -> SurfacePrimitive:
    ptype = PrimitiveType(d["type"])
    cls = AxisClass(d["axis_class"]) if "axis_class" in d else None
    arr = lambda k: np.asarray(d[k], dtype=float)
    if ptype is PrimitiveType.PLANE:
        return Plane(arr("normal"), d["offset"], cls)
    if ptype is PrimitiveType.CYLINDER:
        return Cylinder(arr("axis"), arr("point"), d["radius"], cls)
    if ptype is PrimitiveType.SPHERE:
        return Sphere(arr("center"), d["radius"])
    if ptype is PrimitiveType.CONE:
        return Cone(arr("apex"), arr("axis"), d["half_angle"], cls)
    if ptype is PrimitiveType.TORUS:
        return Torus(arr("center"), arr("axis"), d["major_radius"],
                     d["minor_radius"], cls)
    raise ValueError(f"unknown primitive type {ptype!r}")


def write_labels(path, labels: dict) -> None:
    """labels: instance id -> (PrimitiveType, AxisClass | None)."""
    out = {}
    for iid, (ptype, cls) in sorted(labels.items()):
        entry = {"type": PrimitiveType(ptype).value}
        if cls is not None:
            entry["axis_class"] = AxisClass(cls).value
        out[str(int(iid))] = entry
    write_json(path, out)


def read_labels(path) -> dict:
    raw = read_json(path)
    labels = {}
    for key, entry in raw.items():
        cls = AxisClass(entry["axis_class"]) if "axis_class" in entry else None
        labels[int(key)] = (PrimitiveType(entry["type"]), cls)
    return labels


def write_truth(path, primitives: dict, frame_rotation: np.ndarray,
                scale: float = 1.0) -> None:
    """primitives: instance id -> SurfacePrimitive (camera coordinates)."""
    write_json(path, {
        "frame": np.asarray(frame_rotation, dtype=float),
        "scale": scale,
        "primitives": [
            dict(id=int(iid), **primitive_to_json(s))
            for iid, s in sorted(primitives.items())
        ],
    })


def read_truth(path):
    d = read_json(path)
    prims = {int(e["id"]): primitive_from_json(e) for e in d["primitives"]}
    return prims, np.asarray(d["frame"], dtype=float), float(d.get("scale", 1.0))


def write_obj_mesh(path, vertices: np.ndarray, faces: np.ndarray) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(vertices, dtype=float):
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for f in np.asarray(faces, dtype=int):
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def write_obj_edges(path, vertices: np.ndarray, edges_by_class: dict) -> None:
    """Line-set OBJ with one group per edge class."""
    with open(path, "w") as fh:
        for v in np.asarray(vertices, dtype=float):
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for cls in sorted(edges_by_class):
            fh.write(f"g {cls}\n")
            for a, b in edges_by_class[cls]:
                fh.write(f"l {a + 1} {b + 1}\n")


def require(path, description: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"{description}: {path}")
    return path
