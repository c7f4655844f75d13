"""n-dimensional geometric kernel.

Obstacles are closed convex polytopes in half-space form, and finite unions
of them (polyconvex sets).  Points are plain float arrays of shape ``(n,)``;
batches of points are ``(m, n)`` arrays.

Containment is boundary-inclusive: a point on an obstacle facet is treated as
colliding.  Exact volume, surface measure and centroid are available for
n = 2 and n = 3 only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

EPS = 1e-9


class GeometryError(ValueError):
    """Raised when a geometric object violates one of its invariants."""


class ShapeError(GeometryError):
    """Invalid half-space description; ``part``/``index`` locate the culprit."""

    def __init__(self, message, part=None, index=None):
        self.part = part
        self.index = index
        where = []
        if part is not None:
            where.append(f"part {part}")
        if index is not None:
            where.append(f"halfspace {index}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def as_point(x, n=None) -> np.ndarray:
    p = np.asarray(x, dtype=float).ravel()
    if p.size < 1 or not np.all(np.isfinite(p)):
        raise GeometryError(f"invalid point {x!r}")
    if n is not None and p.size != n:
        raise GeometryError(f"dimension mismatch: expected {n}, got {p.size}")
    return p


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The closed set ``{x : normal . x <= offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).ravel()
        norm = float(np.linalg.norm(normal))
        if not np.all(np.isfinite(normal)) or not np.isfinite(self.offset):
            raise GeometryError("half-space coefficients must be finite")
        if norm <= EPS:
            raise GeometryError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", _frozen(normal / norm))
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dimension(self) -> int:
        return self.normal.size


def _dedupe_points(pts: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in pts:
        if not kept or np.min(np.linalg.norm(np.asarray(kept) - p, axis=1)) > tol:
            kept.append(p)
    return np.asarray(kept).reshape(-1, pts.shape[1])


def _affine_rank(pts: np.ndarray, tol: float = 1e-7) -> int:
    if len(pts) <= 1:
        return 0
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    scale = max(1.0, float(np.abs(pts).max()))
    return int(np.sum(s > tol * scale))


def _enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """All feasible intersections of n bounding hyperplanes."""
    m, n = normals.shape
    combos = np.array(list(itertools.combinations(range(m), n)), dtype=int)
    if combos.size == 0:
        return np.empty((0, n))
    mats = normals[combos]
    rhs = offsets[combos]
    ok = np.abs(np.linalg.det(mats)) > 1e-12
    if not np.any(ok):
        return np.empty((0, n))
    pts = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    tol = EPS * max(1.0, float(np.abs(offsets).max()))
    feasible = np.all(pts @ normals.T <= offsets + 10 * tol, axis=1)
    return _dedupe_points(pts[feasible], 1e-7 * max(1.0, float(np.abs(offsets).max())))


def _order_ccw(pts: np.ndarray) -> np.ndarray:
    c = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    return pts[np.argsort(ang, kind="stable")]


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = np.cross(normal, helper)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


class ConvexPolytope:
    """Bounded intersection of half-spaces with nonempty interior.

    Every stored half-space must define a facet: it is tight on a set of
    vertices spanning an (n-1)-dimensional affine subspace.  Violations raise
    :class:`ShapeError` carrying the offending half-space index.
    """

    def __init__(self, halfspaces: Sequence[HalfSpace], *, vertices=None, part=None):
        halfspaces = list(halfspaces)
        if not halfspaces:
            raise ShapeError("polytope needs at least one half-space", part=part)
        n = halfspaces[0].dimension
        for i, h in enumerate(halfspaces):
            if h.dimension != n:
                raise ShapeError(
                    f"dimension {h.dimension} differs from {n}", part=part, index=i)
        self.dimension = n
        self.halfspaces = tuple(halfspaces)
        self.normals = _frozen([h.normal for h in halfspaces])
        self.offsets = _frozen([h.offset for h in halfspaces])
        self._check_bounded(part)
        self._check_interior(part)
        if vertices is None:
            vertices = _enumerate_vertices(self.normals, self.offsets)
        vertices = np.asarray(vertices, dtype=float)
        if n == 2:
            vertices = _order_ccw(vertices)
        self.vertices = _frozen(vertices)
        self._check_irredundant(part)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_arrays(cls, normals, offsets, **kw) -> "ConvexPolytope":
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls([HalfSpace(a, b) for a, b in zip(normals, np.ravel(offsets))], **kw)

    @classmethod
    def from_vertices(cls, points) -> "ConvexPolytope":
        """Convex hull of a point cloud; hull vertices are kept verbatim."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] <= pts.shape[1]:
            raise GeometryError("need at least n+1 points to span a polytope")
        if _affine_rank(pts) < pts.shape[1]:
            raise GeometryError("points are affinely degenerate (zero volume)")
        hull = ConvexHull(pts)
        normals, offsets = _merge_hull_equations(hull.equations)
        return cls.from_arrays(normals, offsets, vertices=pts[np.sort(hull.vertices)])

    @classmethod
    def box(cls, lo, hi) -> "ConvexPolytope":
        lo = as_point(lo)
        hi = as_point(hi, lo.size)
        if np.any(hi - lo <= EPS):
            raise GeometryError("box must have positive extent")
        n = lo.size
        eye = np.eye(n)
        return cls.from_arrays(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))

    @classmethod
    def regular_polygon(cls, sides: int, circumradius: float = 1.0, center=(0.0, 0.0),
                        phase: float = 0.0) -> "ConvexPolytope":
        ang = phase + 2 * np.pi * np.arange(sides) / sides
        pts = np.column_stack([np.cos(ang), np.sin(ang)]) * circumradius
        return cls.from_vertices(pts + as_point(center, 2))

    # -- invariants -----------------------------------------------------------

    def _check_bounded(self, part):
        # Stiemke: {d : A d <= 0} = {0} iff rank A = n and A^T y = 0 for some y > 0
        m = len(self.offsets)
        if np.linalg.matrix_rank(self.normals) < self.dimension:
            raise ShapeError("polytope is unbounded", part=part)
        res = linprog(np.zeros(m), A_eq=self.normals.T, b_eq=np.zeros(self.dimension),
                      bounds=[(1, None)] * m, method="highs")
        if res.status != 0:
            raise ShapeError("polytope is unbounded", part=part)

    def _check_interior(self, part):
        n = self.dimension
        c = np.zeros(n + 1)
        c[-1] = -1.0
        a_ub = np.hstack([self.normals, np.ones((len(self.offsets), 1))])
        res = linprog(c, A_ub=a_ub, b_ub=self.offsets,
                      bounds=[(None, None)] * n + [(0, None)], method="highs")
        if res.status != 0 or res.x[-1] <= EPS:
            raise ShapeError("polytope is empty or has no interior", part=part)
        self.chebyshev_center = _frozen(res.x[:n])
        self.chebyshev_radius = float(res.x[-1])

    def _check_irredundant(self, part):
        n = self.dimension
        tol = 1e-7 * max(1.0, float(np.abs(self.offsets).max()))
        slack = self.offsets[None, :] - self.vertices @ self.normals.T
        if np.any(slack < -tol):
            bad = int(np.argmin(slack.min(axis=0)))
            raise ShapeError("vertex violates constraint", part=part, index=bad)
        for i in range(len(self.offsets)):
            for j in range(i):
                if (np.linalg.norm(self.normals[i] - self.normals[j]) < 1e-9
                        and abs(self.offsets[i] - self.offsets[j]) < tol):
                    raise ShapeError(f"duplicates half-space {j}", part=part, index=i)
            tight = self.vertices[np.abs(slack[:, i]) <= tol]
            if _affine_rank(tight) < n - 1 or len(tight) < n:
                raise ShapeError("redundant half-space (not a facet)", part=part, index=i)

    # -- queries --------------------------------------------------------------

    def contains(self, x) -> bool:
        x = as_point(x, self.dimension)
        return bool(np.all(self.normals @ x <= self.offsets + EPS))

    def contains_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.all(pts @ self.normals.T <= self.offsets + EPS, axis=-1)

    def facets(self) -> list[np.ndarray]:
        """Vertex arrays of each facet, in half-space order (3D: ordered CCW)."""
        tol = 1e-7 * max(1.0, float(np.abs(self.offsets).max()))
        slack = self.offsets[None, :] - self.vertices @ self.normals.T
        out = []
        for i, normal in enumerate(self.normals):
            pts = self.vertices[np.abs(slack[:, i]) <= tol]
            if self.dimension == 3:
                u, v = _plane_basis(normal)
                c = pts.mean(axis=0)
                ang = np.arctan2((pts - c) @ v, (pts - c) @ u)
                pts = pts[np.argsort(ang, kind="stable")]
            out.append(pts)
        return out

    def transformed(self, motion: "RigidMotion") -> "ConvexPolytope":
        r, t = motion.rotation, motion.translation
        normals = self.normals @ r.T
        offsets = self.offsets + normals @ t
        verts = self.vertices @ r.T + t
        return ConvexPolytope.from_arrays(normals, offsets, vertices=verts)

    def scaled(self, factor: float, about=None) -> "ConvexPolytope":
        if factor <= 0:
            raise GeometryError("scale factor must be positive")
        c = np.zeros(self.dimension) if about is None else as_point(about, self.dimension)
        offsets = factor * (self.offsets - self.normals @ c) + self.normals @ c
        verts = factor * (self.vertices - c) + c
        return ConvexPolytope.from_arrays(self.normals, offsets, vertices=verts)

    def intersection(self, other: "ConvexPolytope") -> "ConvexPolytope | None":
        """Full-dimensional intersection, or None when it has no interior."""
        pts = intersection_vertices(self, other)
        if len(pts) <= self.dimension or _affine_rank(pts) < self.dimension:
            return None
        return ConvexPolytope.from_vertices(pts)

    def __repr__(self):
        return f"ConvexPolytope(dim={self.dimension}, facets={len(self.offsets)}, vertices={len(self.vertices)})"


def _merge_hull_equations(equations: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # qhull triangulates facets in 3D; coplanar pieces share an equation
    normals = equations[:, :-1]
    offsets = -equations[:, -1]
    scale = max(1.0, float(np.abs(offsets).max()))
    keep_n, keep_b = [], []
    for a, b in zip(normals, offsets):
        if any(np.linalg.norm(a - ka) < 1e-9 and abs(b - kb) < 1e-9 * scale
               for ka, kb in zip(keep_n, keep_b)):
            continue
        keep_n.append(a)
        keep_b.append(b)
    return np.asarray(keep_n), np.asarray(keep_b)


def intersection_vertices(a: ConvexPolytope, b: ConvexPolytope) -> np.ndarray:
    """Vertices of ``a & b``; may be empty or lower-dimensional."""
    if a.dimension != b.dimension:
        raise GeometryError("dimension mismatch")
    normals = np.vstack([a.normals, b.normals])
    offsets = np.concatenate([a.offsets, b.offsets])
    return _enumerate_vertices(normals, offsets)


class PolyconvexSet:
    """Finite union of convex polytopes (parts may overlap)."""

    def __init__(self, parts: Iterable[ConvexPolytope]):
        parts = tuple(parts)
        if not parts:
            raise GeometryError("polyconvex set needs at least one part")
        n = parts[0].dimension
        if any(p.dimension != n for p in parts):
            raise GeometryError("all parts must share one dimension")
        self.parts = parts
        self.dimension = n

    @classmethod
    def of(cls, shape) -> "PolyconvexSet":
        return shape if isinstance(shape, PolyconvexSet) else cls([shape])

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack([p.vertices for p in self.parts])

    def contains(self, x) -> bool:
        x = as_point(x, self.dimension)
        return any(p.contains(x) for p in self.parts)

    def contains_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1], dtype=bool)
        for p in self.parts:
            out |= p.contains_many(pts)
        return out

    def transformed(self, motion: "RigidMotion") -> "PolyconvexSet":
        return PolyconvexSet(p.transformed(motion) for p in self.parts)

    def __repr__(self):
        return f"PolyconvexSet(dim={self.dimension}, parts={len(self.parts)})"


@dataclass(frozen=True, eq=False)
class Segment:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = as_point(self.p)
        q = as_point(self.q, p.size)
        object.__setattr__(self, "p", _frozen(p))
        object.__setattr__(self, "q", _frozen(q))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.q - self.p))

    @property
    def dimension(self) -> int:
        return self.p.size


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_point(self.center)))
        if not self.radius > 0:
            raise GeometryError("ball radius must be positive")


@dataclass(frozen=True, eq=False)
class RigidMotion:
    """x -> rotation @ x + translation, with rotation in SO(n)."""

    rotation: np.ndarray
    translation: np.ndarray = field(default=None)

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.rotation, dtype=float))
        n = r.shape[0]
        if r.shape != (n, n):
            raise GeometryError("rotation must be square")
        if not np.allclose(r.T @ r, np.eye(n), atol=EPS) or abs(np.linalg.det(r) - 1) > EPS:
            raise GeometryError("rotation must be orthonormal with determinant +1")
        t = np.zeros(n) if self.translation is None else as_point(self.translation, n)
        object.__setattr__(self, "rotation", _frozen(r))
        object.__setattr__(self, "translation", _frozen(t))

    @classmethod
    def identity(cls, n: int) -> "RigidMotion":
        return cls(np.eye(n))

    @classmethod
    def planar(cls, angle: float, translation=(0.0, 0.0)) -> "RigidMotion":
        c, s = np.cos(angle), np.sin(angle)
        return cls(np.array([[c, -s], [s, c]]), translation)

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, spread: float = 1.0) -> "RigidMotion":
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return cls(q, spread * rng.standard_normal(n))

    def apply(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.rotation.T + self.translation


# -- operations ---------------------------------------------------------------

def contains(poly: ConvexPolytope, x) -> bool:
    return poly.contains(x)


def contains_polyconvex(shape: PolyconvexSet, x) -> bool:
    return shape.contains(x)


def _part_interval(part: ConvexPolytope, origin: np.ndarray, direction: np.ndarray):
    """Parameter interval of the line origin + t*direction inside ``part``.

    Lines parallel to and within EPS of a facet plane are treated as missing
    the part (grazing contact produces no flip).
    """
    num = part.offsets - part.normals @ origin
    den = part.normals @ direction
    parallel = np.abs(den) < EPS
    if np.any(parallel & (num <= EPS)):
        return None
    with np.errstate(divide="ignore"):
        ratio = num / np.where(parallel, 1.0, den)
    lo = ratio[~parallel & (den < 0)]
    hi = ratio[~parallel & (den > 0)]
    t_lo = lo.max() if lo.size else -np.inf
    t_hi = hi.min() if hi.size else np.inf
    if t_hi - t_lo <= EPS:
        return None
    return t_lo, t_hi


def _merge_intervals(intervals):
    merged: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + EPS:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return merged


def ray_boundary_hits(shape, origin, direction, max_len: float) -> list[float]:
    """Sorted ray parameters in (0, max_len] where membership in ``shape`` flips."""
    shape = PolyconvexSet.of(shape)
    origin = as_point(origin, shape.dimension)
    direction = as_point(direction, shape.dimension)
    if abs(np.linalg.norm(direction) - 1.0) > EPS:
        raise GeometryError("direction must be a unit vector")
    if not max_len > 0:
        raise GeometryError("max_len must be positive")
    spans = [iv for p in shape.parts if (iv := _part_interval(p, origin, direction))]
    hits = []
    for lo, hi in _merge_intervals(spans):
        for t in (lo, hi):
            if EPS < t <= max_len + EPS:
                hits.append(float(t))
    return hits


def on_boundary(shape, x) -> bool:
    """x lies in the closed set but in no part's open interior."""
    shape = PolyconvexSet.of(shape)
    x = as_point(x, shape.dimension)
    if not shape.contains(x):
        return False
    return not any(np.all(p.normals @ x < p.offsets - EPS) for p in shape.parts)


def segment_intersects_boundary(shape, seg: Segment) -> bool:
    shape = PolyconvexSet.of(shape)
    if seg.dimension != shape.dimension:
        raise GeometryError("dimension mismatch")
    if on_boundary(shape, seg.p) or on_boundary(shape, seg.q):
        return True
    length = seg.length
    if length <= EPS:
        return False
    direction = (seg.q - seg.p) / length
    return bool(ray_boundary_hits(shape, seg.p, direction, length))


def clip_intervals(shape, starts: np.ndarray, deltas: np.ndarray):
    """Vectorised line clipping of many parametrised lines ``P + t*D``.

    Returns ``(lo, hi)`` arrays of shape ``(m, parts)``; an empty
    intersection has ``lo >= hi``.  Grazing is handled as in
    :func:`ray_boundary_hits`.
    """
    shape = PolyconvexSet.of(shape)
    m = len(starts)
    lo = np.empty((m, len(shape.parts)))
    hi = np.empty((m, len(shape.parts)))
    for k, part in enumerate(shape.parts):
        num = part.offsets[None, :] - starts @ part.normals.T
        den = deltas @ part.normals.T
        parallel = np.abs(den) < EPS
        safe = np.where(parallel, 1.0, den)
        ratio = num / safe
        lo[:, k] = np.where(~parallel & (den < 0), ratio, -np.inf).max(axis=1)
        hi[:, k] = np.where(~parallel & (den > 0), ratio, np.inf).min(axis=1)
        blocked = np.any(parallel & (num <= EPS), axis=1)
        lo[blocked, k] = np.inf
        hi[blocked, k] = -np.inf
    return lo, hi


def merged_components(lo: np.ndarray, hi: np.ndarray, t0: float = -np.inf,
                      t1: float = np.inf):
    """Merge per-part intervals (clipped to [t0, t1]) row by row.

    Returns ``(count, covered_from_t0_to_t1, interior_ends)`` where
    ``interior_ends`` counts component endpoints strictly inside (t0, t1),
    i.e. the number of membership flips on the clipped range.
    """
    lo = np.clip(lo, t0, t1)
    hi = np.clip(hi, t0, t1)
    valid = hi - lo > EPS
    order = np.argsort(np.where(valid, lo, np.inf), axis=1, kind="stable")
    lo = np.take_along_axis(lo, order, axis=1)
    hi = np.take_along_axis(hi, order, axis=1)
    valid = np.take_along_axis(valid, order, axis=1)
    m, k = lo.shape
    count = np.zeros(m, dtype=int)
    ends = np.zeros(m, dtype=int)
    cur_lo = np.full(m, np.nan)
    cur_hi = np.full(m, -np.inf)
    full = np.zeros(m, dtype=bool)

    def close(mask):
        ends[mask] += (cur_lo[mask] > t0 + EPS).astype(int) + (cur_hi[mask] < t1 - EPS).astype(int)
        np.logical_or(full, mask & (cur_lo <= t0 + EPS) & (cur_hi >= t1 - EPS), out=full)

    for j in range(k):
        v = valid[:, j]
        new = v & (lo[:, j] > cur_hi + EPS)
        close(new & (count > 0))
        count[new] += 1
        cur_lo[new] = lo[new, j]
        cur_hi[new] = hi[new, j]
        ext = v & ~new
        cur_hi[ext] = np.maximum(cur_hi[ext], hi[ext, j])
    close(count > 0)
    return count, full, ends


def segments_hit_boundary(shape, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised boundary test for segments ``p[i] -> q[i]``.

    A segment meets the boundary iff it covers some but not all of its
    length with the obstacle; this agrees with
    :func:`segment_intersects_boundary` except on measure-zero contacts.
    """
    lo, hi = clip_intervals(shape, p, q - p)
    count, full, _ = merged_components(lo, hi, 0.0, 1.0)
    return (count > 0) & ~full


def _polygon_area_centroid(v: np.ndarray) -> tuple[float, np.ndarray]:
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return float(area), np.array([cx, cy])


def _require_exact_dim(poly: ConvexPolytope):
    if poly.dimension not in (2, 3):
        raise GeometryError(
            f"exact volume/surface only for n in (2, 3), got n={poly.dimension}")


def _volume_centroid_3d(poly: ConvexPolytope) -> tuple[float, np.ndarray]:
    apex = poly.vertices.mean(axis=0)
    total = 0.0
    moment = np.zeros(3)
    for face in poly.facets():
        for k in range(1, len(face) - 1):
            a, b, c = face[0], face[k], face[k + 1]
            vol = abs(np.dot(a - apex, np.cross(b - apex, c - apex))) / 6.0
            total += vol
            moment += vol * (apex + a + b + c) / 4.0
    return total, moment / total


def volume(poly: ConvexPolytope) -> float:
    _require_exact_dim(poly)
    if poly.dimension == 2:
        return abs(_polygon_area_centroid(poly.vertices)[0])
    return _volume_centroid_3d(poly)[0]


def surface_measure(poly: ConvexPolytope) -> float:
    """Perimeter in 2D, total facet area in 3D."""
    _require_exact_dim(poly)
    v = poly.vertices
    if poly.dimension == 2:
        return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())
    area = 0.0
    for face in poly.facets():
        for k in range(1, len(face) - 1):
            area += np.linalg.norm(np.cross(face[k] - face[0], face[k + 1] - face[0])) / 2.0
    return float(area)


def centroid(poly: ConvexPolytope) -> np.ndarray:
    """Volume-weighted centroid via a fan decomposition."""
    _require_exact_dim(poly)
    if poly.dimension == 2:
        area, c = _polygon_area_centroid(poly.vertices)
    else:
        area, c = _volume_centroid_3d(poly)
    if abs(area) <= EPS:
        raise GeometryError("degenerate polytope has no centroid")
    return c


def diameter(shape) -> float:
    """Largest pairwise vertex distance (accepts a shape or a raw point array)."""
    if isinstance(shape, (ConvexPolytope, PolyconvexSet)):
        pts = shape.vertices
    else:
        pts = np.atleast_2d(np.asarray(shape, dtype=float))
    if len(pts) > 8 and pts.shape[1] >= 2 and _affine_rank(pts) == pts.shape[1]:
        pts = pts[ConvexHull(pts).vertices]
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def bounding_ball(shape) -> Ball:
    """Smallest enclosing ball of the vertex set."""
    pts = PolyconvexSet.of(shape).vertices
    center = _min_enclosing_center(pts)
    radius = float(np.linalg.norm(pts - center, axis=1).max())
    return Ball(center, radius)


def _min_enclosing_center(pts: np.ndarray) -> np.ndarray:
    # farthest-point iterations (Badoiu-Clarkson), then a short polish
    c = pts.mean(axis=0)
    for k in range(1, 2000):
        far = pts[np.argmax(np.linalg.norm(pts - c, axis=1))]
        c = c + (far - c) / (k + 1)
    from scipy.optimize import minimize

    res = minimize(lambda z: np.linalg.norm(pts - z, axis=1).max(), c, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 4000})
    return res.x if res.fun <= np.linalg.norm(pts - c, axis=1).max() else c


def apply_motion(motion: RigidMotion, seg: Segment) -> Segment:
    if motion.rotation.shape[0] != seg.dimension:
        raise GeometryError("dimension mismatch")
    return Segment(motion.apply(seg.p), motion.apply(seg.q))


# -- unions ---------------------------------------------------------------------

def union_boundary_pieces(shape: PolyconvexSet) -> list[tuple[np.ndarray, np.ndarray]]:
    """Directed edge pieces (CCW per part) forming the boundary of a 2D union."""
    shape = PolyconvexSet.of(shape)
    if shape.dimension != 2:
        raise GeometryError("union boundary tracing is 2D only")
    scale = max(1.0, float(np.abs(shape.vertices).max()))
    eta = 1e-7 * scale
    pieces = []
    for i, part in enumerate(shape.parts):
        v = part.vertices
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            edge = b - a
            length = np.linalg.norm(edge)
            outward = np.array([edge[1], -edge[0]]) / length
            cuts = {0.0, 1.0}
            for j, other in enumerate(shape.parts):
                if j == i:
                    continue
                iv = _part_interval(other, a, edge)
                if iv is None:
                    # edge collinear with a facet of ``other``: use vertex projections
                    for w in other.vertices:
                        t = float(np.dot(w - a, edge) / length ** 2)
                        if 0 < t < 1:
                            cuts.add(t)
                    continue
                for t in iv:
                    if 0 < t < 1:
                        cuts.add(float(t))
            ts = sorted(cuts)
            for t0, t1 in zip(ts[:-1], ts[1:]):
                if t1 - t0 < 1e-12:
                    continue
                mid = a + 0.5 * (t0 + t1) * edge
                if shape.contains(mid + eta * outward) or not shape.contains(mid - eta * outward):
                    continue
                # coincident edges of two parts: count the piece once
                if any(_on_facet_with_normal(shape.parts[j], mid, outward, eta) for j in range(i)):
                    continue
                pieces.append((a + t0 * edge, a + t1 * edge))
    return pieces


def _on_facet_with_normal(part: ConvexPolytope, x, normal, tol) -> bool:
    if not np.all(part.normals @ x <= part.offsets + tol):
        return False
    same = np.linalg.norm(part.normals - normal, axis=1) < 1e-9
    return bool(np.any(same & (np.abs(part.offsets - part.normals @ x) < tol)))


def boundary_measure(shape) -> float:
    """(n-1)-measure of the boundary of a union (exact for 2D unions and convex 3D)."""
    shape = PolyconvexSet.of(shape)
    if len(shape.parts) == 1:
        return surface_measure(shape.parts[0])
    if shape.dimension != 2:
        raise GeometryError("boundary measure of 3D unions is not supported")
    return float(sum(np.linalg.norm(q - p) for p, q in union_boundary_pieces(shape)))


def union_volume(shape) -> float:
    """n-volume of a union: Green's theorem on the traced boundary in 2D,
    inclusion-exclusion over part intersections otherwise."""
    shape = PolyconvexSet.of(shape)
    if len(shape.parts) == 1:
        return volume(shape.parts[0])
    if shape.dimension == 2:
        return float(sum(p[0] * q[1] - q[0] * p[1] for p, q in union_boundary_pieces(shape)) / 2.0)
    total = 0.0
    k = len(shape.parts)
    for r in range(1, k + 1):
        for combo in itertools.combinations(shape.parts, r):
            inter = combo[0]
            for other in combo[1:]:
                inter = inter.intersection(other) if inter is not None else None
            if inter is not None:
                total += (-1) ** (r + 1) * volume(inter)
    return total
