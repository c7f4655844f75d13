import numpy as np
import pytest

from obstacleprm import rng as rngmod
from obstacleprm.geometry import ConvexPolytope, PolyconvexSet, Segment, segment_intersects_boundary
from obstacleprm.obprm import ObprmParams, generate_nodes
from obstacleprm.roadmap import (
    Query, SampleInCollision, build_roadmap, local_planner, path_length, query,
)
from obstacleprm.shapes import narrow_passage_walls

EMPTY_ENV = PolyconvexSet.of(ConvexPolytope.box([100, 100], [101, 101]))
WALL = PolyconvexSet.of(ConvexPolytope.box([4, -10], [5, 10]))


class TestLocalPlanner:
    def test_clear(self):
        assert local_planner(WALL, (0, 0), (3, 5), 0.01)

    def test_through_centre(self):
        assert not local_planner(WALL, (0, 0), (9, 0), 0.01)

    def test_grazing_agrees_with_crossing_test(self, unit_square):
        cases = [((-0.5, 1.001), (1.5, 1.001)),   # passes just above the top face
                 ((-0.5, 1.001), (1.5, 0.999)),   # dips in across the top face
                 ((1.001, -0.5), (1.001, 1.5)),
                 ((-0.5, -0.5), (1.5, 1.5))]
        for a, b in cases:
            crosses = segment_intersects_boundary(unit_square, Segment(a, b))
            assert local_planner(unit_square, a, b, 1e-3) == (not crosses)


class TestBuild:
    def test_collinear_path_graph(self):
        rm = build_roadmap(EMPTY_ENV, [[0, 0], [1, 0], [2, 0]], 2, 0.05)
        assert sorted(rm.graph.edges) == [(0, 1), (0, 2), (1, 2)]
        rm = build_roadmap(EMPTY_ENV, [[0, 0], [1, 0], [2, 0]], 1, 0.05)
        assert sorted(rm.graph.edges) == [(0, 1), (1, 2)]
        assert rm.graph.edges[0, 1]["weight"] == pytest.approx(1.0)

    def test_wall_splits(self):
        rm = build_roadmap(WALL, [[0, 0], [1, 1], [8, 0], [9, 1]], 3, 0.05)
        assert sorted(map(sorted, rm.components())) == [[0, 1], [2, 3]]

    def test_collision_sample_rejected(self):
        with pytest.raises(SampleInCollision) as err:
            build_roadmap(WALL, [[0, 0], [4.5, 0]], 1, 0.05)
        assert err.value.index == 1

    def test_deterministic(self):
        pts = np.random.default_rng(0).uniform(-10, 10, size=(80, 2))
        pts = pts[~WALL.contains_many(pts)]
        a = build_roadmap(WALL, pts, 5, 0.05)
        b = build_roadmap(WALL, pts, 5, 0.05)
        assert list(a.graph.edges(data=True)) == list(b.graph.edges(data=True))


class TestQuery:
    def test_same_point(self):
        rm = build_roadmap(EMPTY_ENV, [[0, 0]], 1, 0.05)
        path = query(rm, EMPTY_ENV, Query((1, 1), (1, 1)))
        assert len(path) == 1

    def test_straight_shot(self):
        rm = build_roadmap(EMPTY_ENV, [[5, 5]], 1, 0.05)
        path = query(rm, EMPTY_ENV, Query((0, 0), (1, 0)))
        assert len(path) == 2 and path_length(path) == pytest.approx(1.0)

    def test_disconnected(self):
        closed = PolyconvexSet.of(ConvexPolytope.box([4, -100], [5, 100]))
        rm = build_roadmap(closed, [[0, 0], [9, 0]], 1, 0.05)
        assert query(rm, closed, Query((1, 0), (8, 0))) is None

    def test_paths_are_valid(self):
        g = np.random.default_rng(3)
        env = PolyconvexSet([ConvexPolytope.box([4, -10], [5, 3]), ConvexPolytope.box([8, -3], [9, 10])])
        pts = g.uniform(-2, 12, size=(400, 2))
        pts = pts[~env.contains_many(pts)]
        rm = build_roadmap(env, pts, 8, 0.05)
        for _ in range(10):
            start, goal = g.uniform(-2, 12, size=(2, 2))
            if env.contains(start) or env.contains(goal):
                continue
            path = query(rm, env, Query(start, goal))
            if path is None:
                continue
            assert all(local_planner(env, a, b, 0.05) for a, b in zip(path, path[1:]))
            assert path_length(path) >= np.linalg.norm(goal - start) - 1e-12


# -- narrow passage ---------------------------------------------------------------

SIZE = 20.0
NP_QUERY = Query((2.0, 4.0), (18.0, 16.0))


def passage_arms(env, seed, rays=50, delta=0.2, ray_length=12.0):
    """Milestones for both arms at equal budget.

    The OBPRM arm is half uniform and half obstacle-surface nodes; the
    uniform arm spends the whole budget on uniform free samples.
    """
    nodes = np.vstack([generate_nodes(part, ObprmParams(rays, ray_length, delta),
                                      rngmod.derive_seed(seed, rngmod.RAYS, i)).nodes
                       for i, part in enumerate(env.parts)])
    keep = np.all((nodes >= 0) & (nodes <= SIZE), axis=1) & ~env.contains_many(nodes)
    nodes = nodes[keep]
    g = rngmod.stream(seed, rngmod.UNIFORM)
    uniform = []
    while len(uniform) < 2 * len(nodes):
        x = g.random(2) * SIZE
        if not env.contains(x):
            uniform.append(x)
    uniform = np.array(uniform)
    return np.vstack([uniform[:len(nodes)], nodes]), uniform


def test_narrow_passage_obprm_beats_uniform():
    env = narrow_passage_walls(gap=0.6, thickness=2.0, size=SIZE)
    wins = 0
    for seed in range(20):
        seeded, uniform = passage_arms(env, seed)
        assert len(seeded) == len(uniform)
        a = query(build_roadmap(env, seeded, 20, 0.05), env, NP_QUERY) is not None
        b = query(build_roadmap(env, uniform, 20, 0.05), env, NP_QUERY) is not None
        wins += a and not b
    assert wins > 10
