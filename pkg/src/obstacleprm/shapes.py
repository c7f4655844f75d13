"""Shape files and the obstacle fixtures used in the experiments.

Shape JSON::

    {"dimension": n,
     "parts": [{"halfspaces": [{"normal": [...], "offset": r}, ...]}, ...]}
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .geometry import ConvexPolytope, HalfSpace, PolyconvexSet, ShapeError, GeometryError


def shape_from_dict(raw: dict) -> PolyconvexSet:
    try:
        n = int(raw["dimension"])
        parts_raw = raw["parts"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed shape document: {exc}") from None
    if n < 1:
        raise ShapeError("dimension must be >= 1")
    if not parts_raw:
        raise ShapeError("shape has no parts")
    parts = []
    for pi, part in enumerate(parts_raw):
        halfspaces = []
        for hi, h in enumerate(part.get("halfspaces", [])):
            normal = h.get("normal")
            if normal is None or len(normal) != n or "offset" not in h:
                raise ShapeError(f"expected a {n}-dimensional normal and an offset", part=pi, index=hi)
            try:
                halfspaces.append(HalfSpace(normal, h["offset"]))
            except GeometryError as exc:
                raise ShapeError(str(exc), part=pi, index=hi) from None
        parts.append(ConvexPolytope(halfspaces, part=pi))
    return PolyconvexSet(parts)


def shape_to_dict(shape) -> dict:
    shape = PolyconvexSet.of(shape)
    return {
        "dimension": shape.dimension,
        "parts": [{"halfspaces": [{"normal": [float(x) for x in a], "offset": float(b)}
                                  for a, b in zip(p.normals, p.offsets)]}
                  for p in shape.parts],
    }


def load_shape(path) -> PolyconvexSet:
    with open(path) as fh:
        return shape_from_dict(json.load(fh))


def save_shape(shape, path) -> None:
    Path(path).write_text(json.dumps(shape_to_dict(shape), indent=2) + "\n")


# -- fixtures --------------------------------------------------------------------

CROSS_ARM_WIDTH = 1.5


def square_64() -> PolyconvexSet:
    """8 x 8 square: area 64, perimeter 32."""
    return PolyconvexSet.of(ConvexPolytope.box([-4, -4], [4, 4]))


def rectangle_64() -> PolyconvexSet:
    """4 x 16 rectangle: area 64, perimeter 40."""
    return PolyconvexSet.of(ConvexPolytope.box([-8, -2], [8, 2]))


def cross_64(arm_width: float = CROSS_ARM_WIDTH) -> PolyconvexSet:
    """Plus sign of two centred bars; span chosen so that the area is exactly 64.

    Area 2*span*w - w**2 = 64 gives span = (64 + w**2) / (2 w); the
    perimeter is 4 * span (88.33 for w = 1.5).
    """
    w = arm_width
    half = (64 + w * w) / (4 * w)
    return PolyconvexSet([ConvexPolytope.box([-half, -w / 2], [half, w / 2]),
                          ConvexPolytope.box([-w / 2, -half], [w / 2, half])])


def equal_area_family() -> list[tuple[str, PolyconvexSet]]:
    return [("square", square_64()), ("rectangle", rectangle_64()), ("cross", cross_64())]


def inscribed_convex_family() -> list[tuple[str, PolyconvexSet]]:
    """Convex polygons inscribed in the unit circle (diameter 2), varying perimeter."""
    out = []
    for deg in (15, 25, 35):
        a = math.radians(deg)
        out.append((f"rect{deg}", PolyconvexSet.of(
            ConvexPolytope.box([-math.cos(a), -math.sin(a)], [math.cos(a), math.sin(a)]))))
    for sides in (4, 6, 8, 32):
        out.append((f"ngon{sides}", PolyconvexSet.of(ConvexPolytope.regular_polygon(sides, 1.0))))
    return out


def equal_volume_pair_3d() -> list[tuple[str, PolyconvexSet]]:
    """Unit cube and a 0.5 x 1 x 2 box: volume 1, surface 6 vs 7."""
    return [("cube", PolyconvexSet.of(ConvexPolytope.box([-0.5] * 3, [0.5] * 3))),
            ("slab", PolyconvexSet.of(ConvexPolytope.box([-0.25, -0.5, -1.0], [0.25, 0.5, 1.0])))]


def disc_polygon(sides: int = 64, radius: float = 1.0) -> PolyconvexSet:
    return PolyconvexSet.of(ConvexPolytope.regular_polygon(sides, radius))


def narrow_passage_walls(gap: float = 0.6, thickness: float = 2.0, size: float = 20.0) -> PolyconvexSet:
    """Vertical wall across a square workspace with one gap at mid height."""
    x0 = size / 2 - thickness / 2
    y_lo = size / 2 - gap / 2
    return PolyconvexSet([ConvexPolytope.box([x0, 0.0], [x0 + thickness, y_lo]),
                          ConvexPolytope.box([x0, y_lo + gap], [x0 + thickness, size])])


def write_fixtures(directory) -> list[Path]:
    """Write every fixture as a shape file; returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, shape in equal_area_family() + inscribed_convex_family() + equal_volume_pair_3d():
        path = directory / f"{name}.json"
        save_shape(shape, path)
        written.append(path)
    return written


def polygon_outline(poly: ConvexPolytope) -> np.ndarray:
    v = np.asarray(poly.vertices)
    return np.vstack([v, v[:1]])
