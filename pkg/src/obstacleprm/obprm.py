"""Obstacle-surface node generation.

Rays are cast from a registration point inside the C-obstacle in uniformly
random directions.  Each ray of length ``l`` is cut in half repeatedly
until the bracket ``[last inside, first outside]`` is no longer than
``delta``; the outside end is a free node within ``delta`` of the obstacle
surface.  A ray whose far end is still inside the obstacle has no such
bracket and counts as a failure.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .geometry import (
    EPS,
    GeometryError,
    PolyconvexSet,
    as_point,
    centroid,
    ray_boundary_hits,
    volume,
)


class Status(enum.Enum):
    FREE_NODE = "free_node"
    ENDPOINT_INSIDE = "endpoint_inside_obstacle"
    NO_CROSSING = "no_boundary_crossing"


def required_iterations(ray_length: float, delta: float) -> int:
    """Halvings needed to shrink ``ray_length`` to at most ``delta``.

    Equal to ceil(log2(ray_length / delta)) but computed by exact halving,
    so powers of two do not suffer from log rounding.
    """
    k, width = 0, float(ray_length)
    while width > delta:
        width /= 2.0
        k += 1
    return k


@dataclass(frozen=True, eq=False)
class ObprmParams:
    num_rays: int
    ray_length: float
    delta: float
    max_iterations: int | None = None
    registration: np.ndarray | None = None  # None: centroid of the largest part

    def __post_init__(self):
        if self.num_rays < 1:
            raise ValueError("num_rays must be >= 1")
        if not 0 < self.delta < self.ray_length:
            raise ValueError("need 0 < delta < ray_length")
        need = required_iterations(self.ray_length, self.delta)
        cap = need if self.max_iterations is None else int(self.max_iterations)
        if cap < need:
            raise ValueError(f"max_iterations must be >= {need} for l={self.ray_length}, delta={self.delta}")
        object.__setattr__(self, "max_iterations", cap)
        if self.registration is not None:
            object.__setattr__(self, "registration", as_point(self.registration))


@dataclass(frozen=True, eq=False)
class RayOutcome:
    direction: np.ndarray
    status: Status
    point: np.ndarray | None = None
    iterations: int = 0
    inside_point: np.ndarray | None = None
    crossing_index: int | None = None  # which exit along the ray the node sits at
    reenters: bool | None = None  # ray enters the obstacle again before its end

    @property
    def success(self) -> bool:
        return self.status is Status.FREE_NODE


@dataclass(frozen=True, eq=False)
class NodeBatch:
    outcomes: tuple
    origin: np.ndarray = field(default=None)
    success_count: int = field(init=False)
    success_rate: float = field(init=False)

    def __post_init__(self):
        count = sum(o.success for o in self.outcomes)
        object.__setattr__(self, "success_count", count)
        object.__setattr__(self, "success_rate", count / len(self.outcomes))

    @property
    def nodes(self) -> np.ndarray:
        pts = [o.point for o in self.outcomes if o.success]
        n = len(self.outcomes[0].direction)
        return np.asarray(pts).reshape(-1, n)

    def to_csv(self) -> str:
        n = len(self.outcomes[0].direction)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ray_index"] + [f"dir_{k}" for k in range(n)] + ["status"]
                   + [f"node_{k}" for k in range(n)] + ["iterations"])
        for i, o in enumerate(self.outcomes):
            node = [_fmt(x) for x in o.point] if o.point is not None else [""] * n
            w.writerow([i] + [_fmt(x) for x in o.direction] + [o.status.value] + node + [o.iterations])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(f"{float(x):.12g}"))


def registration_point(shape, params: ObprmParams) -> np.ndarray:
    shape = PolyconvexSet.of(shape)
    if params.registration is not None:
        p = as_point(params.registration, shape.dimension)
        if not shape.contains(p):
            raise GeometryError(f"registration point {p.tolist()} lies outside the obstacle")
        return p
    if shape.dimension in (2, 3):
        vols = [volume(part) for part in shape.parts]
        return centroid(shape.parts[int(np.argmax(vols))])
    return shape.parts[0].vertices.mean(axis=0)


def sample_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("directions need n >= 2")
    return rngmod.uniform_directions(rng, 1, n)[0]


def _bisect(shape: PolyconvexSet, origin: np.ndarray, dirs: np.ndarray, params: ObprmParams):
    l, delta = params.ray_length, params.delta
    free_end = ~shape.contains_many(origin + l * dirs)
    lo = np.zeros(len(dirs))
    hi = np.full(len(dirs), l)
    width, it = l, 0
    while width > delta and it < params.max_iterations:
        mid = 0.5 * (lo + hi)
        inside = shape.contains_many(origin + mid[:, None] * dirs)
        lo = np.where(free_end & inside, mid, lo)
        hi = np.where(free_end & ~inside, mid, hi)
        width /= 2.0
        it += 1
    return free_end, lo, hi, it


def _outcomes(shape, origin, dirs, params, trace_crossings=True) -> list[RayOutcome]:
    free_end, lo, hi, it = _bisect(shape, origin, dirs, params)
    out = []
    for k, d in enumerate(dirs):
        if not free_end[k]:
            out.append(RayOutcome(d, Status.ENDPOINT_INSIDE))
            continue
        index = reenters = None
        if trace_crossings:
            hits = ray_boundary_hits(shape, origin, d, params.ray_length)
            after = [j for j, t in enumerate(hits) if t > lo[k] - EPS]
            if not after:
                out.append(RayOutcome(d, Status.NO_CROSSING))
                continue
            j = after[0]
            index, reenters = j // 2, len(hits) > j + 1
        out.append(RayOutcome(d, Status.FREE_NODE, origin + hi[k] * d, it,
                              origin + lo[k] * d, index, reenters))
    return out


def cast_and_bisect(shape, origin, direction, params: ObprmParams) -> RayOutcome:
    shape = PolyconvexSet.of(shape)
    origin = as_point(origin, shape.dimension)
    direction = as_point(direction, shape.dimension)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise GeometryError("direction must be a unit vector")
    if not shape.contains(origin):
        raise GeometryError("ray origin must lie inside the obstacle")
    return _outcomes(shape, origin, direction[None, :], params)[0]


def ray_directions(n: int, count: int, rng_seed: int) -> np.ndarray:
    """One direction per ray, each from its own (seed, ray index) stream."""
    return np.array([sample_direction(rngmod.stream(rng_seed, rngmod.RAYS, i), n)
                     for i in range(count)])


def generate_nodes(shape, params: ObprmParams, rng_seed: int, *, trace_crossings: bool = True) -> NodeBatch:
    shape = PolyconvexSet.of(shape)
    origin = registration_point(shape, params)
    dirs = ray_directions(shape.dimension, params.num_rays, rng_seed)
    return NodeBatch(tuple(_outcomes(shape, origin, dirs, params, trace_crossings)), origin)

