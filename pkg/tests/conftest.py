import numpy as np
import pytest

from obstacleprm.geometry import ConvexPolytope, PolyconvexSet


@pytest.fixture
def unit_square():
    return ConvexPolytope.box([0, 0], [1, 1])


@pytest.fixture
def unit_cube():
    return ConvexPolytope.box([0, 0, 0], [1, 1, 1])


@pytest.fixture
def plus_sign():
    """Two 4 x 1 bars crossing at the origin."""
    return PolyconvexSet([ConvexPolytope.box([-2, -0.5], [2, 0.5]),
                          ConvexPolytope.box([-0.5, -2], [0.5, 2])])


def scan_flips(shape, origin, direction, max_len, step=1e-4):
    """Membership-flip oracle: parameters where a dense scan changes inside/outside."""
    t = np.arange(0.0, max_len + step / 2, step)
    inside = shape.contains_many(np.asarray(origin) + t[:, None] * np.asarray(direction))
    idx = np.nonzero(inside[1:] != inside[:-1])[0]
    return t[idx] + step / 2


def random_convex_polygon(g, sides=None, spread=1.0):
    """Hull of random points; retries until the hull is a proper polygon."""
    while True:
        pts = g.uniform(-spread, spread, size=(sides or g.integers(5, 14), 2))
        try:
            return ConvexPolytope.from_vertices(pts)
        except ValueError:
            continue
