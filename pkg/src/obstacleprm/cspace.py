"""Translational configuration-space obstacles and contact-feature counts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolytope, GeometryError, PolyconvexSet


class RobotShape:
    """Rigid robot body in its own frame; the reference point is the origin.

    ``RobotShape.point(n)`` is the point robot, whose C-obstacles coincide
    with the workspace obstacles.
    """

    def __init__(self, body: ConvexPolytope | None, dimension: int | None = None):
        if body is None:
            if dimension is None:
                raise GeometryError("point robot needs a dimension")
            self.body = None
            self.dimension = dimension
            self.vertices = np.zeros((1, dimension))
            return
        if not body.contains(np.zeros(body.dimension)):
            raise GeometryError("robot body must contain its reference point (the origin)")
        self.body = body
        self.dimension = body.dimension
        self.vertices = body.vertices

    @classmethod
    def point(cls, n: int) -> "RobotShape":
        return cls(None, n)


@dataclass(frozen=True)
class FeatureCount:
    robot_features: int
    obstacle_features: int
    dof: int

    def __post_init__(self):
        if min(self.robot_features, self.obstacle_features, self.dof) < 1:
            raise ValueError("feature counts and degrees of freedom must be >= 1")


def minkowski_cobstacle(obstacle: ConvexPolytope, robot) -> ConvexPolytope:
    """C-obstacle ``{o - a : o in obstacle, a in robot}`` of a translating robot.

    Built as the hull of all vertex differences; hull vertices are the exact
    differences, so integer inputs give integer vertices.
    """
    if isinstance(robot, ConvexPolytope):
        robot = RobotShape(robot)
    if robot.dimension != obstacle.dimension:
        raise GeometryError("dimension mismatch between robot and obstacle")
    if robot.body is None:
        return obstacle
    diffs = (obstacle.vertices[:, None, :] - robot.vertices[None, :, :]).reshape(-1, obstacle.dimension)
    return ConvexPolytope.from_vertices(diffs)


def minkowski_cobstacle_set(obstacles, robot) -> PolyconvexSet:
    """Part-by-part C-obstacle of a nonconvex (union) obstacle."""
    return PolyconvexSet(minkowski_cobstacle(p, robot) for p in PolyconvexSet.of(obstacles).parts)


def contact_hypersurface_count(fc: FeatureCount) -> int:
    """Number of robot-feature / obstacle-feature contact hypersurfaces."""
    return fc.robot_features * fc.obstacle_features


def fold_contact_count(fc: FeatureCount) -> int:
    """Order of the number of (d-1)-fold contacts: m ** (d-1)."""
    return fc.obstacle_features ** (fc.dof - 1)


def feature_count(poly: ConvexPolytope) -> int:
    """Vertices + edges (+ facets in 3D) of a polytope."""
    v = len(poly.vertices)
    if poly.dimension == 2:
        return v + len(poly.offsets)
    if poly.dimension == 3:
        f = len(poly.offsets)
        return v + (v + f - 2) + f
    raise GeometryError("feature counting implemented for n in (2, 3)")
