"""Minimal multi-query PRM over a given set of milestones."""
from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .geometry import GeometryError, PolyconvexSet, as_point


class SampleInCollision(GeometryError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"sample {index} lies inside an obstacle")


def local_planner(env, a, b, resolution: float) -> bool:
    """Straight-line check: every point at spacing <= resolution is free."""
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    env = PolyconvexSet.of(env)
    a = as_point(a, env.dimension)
    b = as_point(b, env.dimension)
    steps = max(1, math.ceil(np.linalg.norm(b - a) / resolution))
    t = np.linspace(0.0, 1.0, steps + 1)
    pts = a + t[:, None] * (b - a)
    return not bool(env.contains_many(pts).any())


@dataclass
class Roadmap:
    nodes: np.ndarray
    graph: nx.Graph
    resolution: float
    k: int

    def components(self) -> list[set]:
        return [set(c) for c in nx.connected_components(self.graph)]


@dataclass(frozen=True, eq=False)
class Query:
    start: np.ndarray
    goal: np.ndarray


def _knn_order(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    # stable sort: equal distances fall back to node index
    return np.argsort(np.linalg.norm(nodes - x, axis=1), kind="stable")


def build_roadmap(env, samples, k: int, resolution: float) -> Roadmap:
    env = PolyconvexSet.of(env)
    if k < 1:
        raise ValueError("k must be >= 1")
    nodes = np.asarray(samples, dtype=float).reshape(-1, env.dimension)
    inside = env.contains_many(nodes)
    if inside.any():
        raise SampleInCollision(int(np.argmax(inside)))
    graph = nx.Graph()
    graph.add_nodes_from(range(len(nodes)))
    for i, x in enumerate(nodes):
        for j in _knn_order(nodes, x)[1:k + 1]:
            j = int(j)
            if graph.has_edge(i, j):
                continue
            if local_planner(env, x, nodes[j], resolution):
                graph.add_edge(i, j, weight=float(np.linalg.norm(x - nodes[j])))
    return Roadmap(nodes, graph, resolution, k)


def query(roadmap: Roadmap, env, q: Query, resolution: float | None = None) -> list[np.ndarray] | None:
    """Shortest milestone path from start to goal, or None if unreachable."""
    env = PolyconvexSet.of(env)
    res = roadmap.resolution if resolution is None else resolution
    start = as_point(q.start, env.dimension)
    goal = as_point(q.goal, env.dimension)
    if env.contains(start) or env.contains(goal):
        raise GeometryError("query endpoints must be in free space")
    if np.allclose(start, goal):
        return [start]
    g = roadmap.graph.copy()
    nodes = roadmap.nodes
    for label, x in (("start", start), ("goal", goal)):
        g.add_node(label)
        if len(nodes):
            for j in _knn_order(nodes, x)[:roadmap.k]:
                if local_planner(env, x, nodes[j], res):
                    g.add_edge(label, int(j), weight=float(np.linalg.norm(x - nodes[j])))
    if local_planner(env, start, goal, res):
        g.add_edge("start", "goal", weight=float(np.linalg.norm(goal - start)))
    try:
        path = nx.shortest_path(g, "start", "goal", weight="weight")
    except nx.NetworkXNoPath:
        return None
    lookup = {"start": start, "goal": goal}
    return [lookup[p] if isinstance(p, str) else nodes[p] for p in path]


def path_length(path) -> float:
    pts = np.asarray(path)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
