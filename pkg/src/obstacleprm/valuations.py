"""Intrinsic volumes and the integral-geometry formulas built on them.

Normalisation follows the intrinsic-volume convention: for a convex body in
the plane ``mu_1`` is half the perimeter, and for the unit ball
``mu_i(B_n) = C(n, i) * omega_n / omega_{n-i}``.  The boundary of an obstacle
is treated as a polyconvex set in its own right, so ``mu_{n-1}(boundary)``
is the full perimeter / surface area.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull

from . import rng as rngmod
from .geometry import (
    ConvexPolytope,
    GeometryError,
    PolyconvexSet,
    Segment,
    _affine_rank,
    bounding_ball,
    clip_intervals,
    intersection_vertices,
    merged_components,
    surface_measure,
    union_volume,
    volume,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValuationVector:
    """``mu[i]`` is the i-th intrinsic volume, i = 0..dimension."""

    dimension: int
    mu: tuple

    def __post_init__(self):
        mu = tuple(float(x) for x in self.mu)
        if len(mu) != self.dimension + 1:
            raise ValueError(f"expected {self.dimension + 1} entries, got {len(mu)}")
        if not all(math.isfinite(x) for x in mu):
            raise ValueError("valuation entries must be finite")
        object.__setattr__(self, "mu", mu)

    def __getitem__(self, i: int) -> float:
        return self.mu[i]

    @classmethod
    def point(cls, n: int) -> "ValuationVector":
        return cls(n, (1.0,) + (0.0,) * n)

    @classmethod
    def segment(cls, n: int, length: float) -> "ValuationVector":
        return cls(n, tuple(mu_segment(i, length) for i in range(n + 1)))

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> "ValuationVector":
        return cls(n, tuple(mu_ball(i, n, radius) for i in range(n + 1)))


def omega(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n < 0:
        raise ValueError("omega(n) needs n >= 0")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def mu_ball(i: int, n: int, r: float = 1.0) -> float:
    if not 0 <= i <= n:
        raise ValueError(f"index {i} outside 0..{n}")
    if not r > 0:
        raise ValueError("radius must be positive")
    return math.comb(n, i) * omega(n) / omega(n - i) * r ** i


def mu_segment(i: int, length: float) -> float:
    if i < 0 or length < 0:
        raise ValueError("need i >= 0 and length >= 0")
    if i == 0:
        return 1.0
    return float(length) if i == 1 else 0.0


def mu_boundary(poly: ConvexPolytope, i: int) -> float:
    """mu_{n-1} and mu_n of the boundary surface of a 2D/3D polytope."""
    n = poly.dimension
    if n not in (2, 3):
        raise GeometryError("boundary valuations need n in (2, 3)")
    if i == n:
        return 0.0
    if i == n - 1:
        return surface_measure(poly)
    raise ValueError(f"mu_{i} of a boundary is only defined here for i in ({n - 1}, {n})")


def _intrinsic_volumes_3d(poly: ConvexPolytope) -> tuple[float, float, float, float]:
    tol = 1e-7 * max(1.0, float(np.abs(poly.offsets).max()))
    tight = np.abs(poly.offsets[None, :] - poly.vertices @ poly.normals.T) <= tol
    mean_width_term = 0.0
    m = len(poly.offsets)
    for a in range(m):
        for b in range(a + 1, m):
            shared = poly.vertices[tight[:, a] & tight[:, b]]
            if len(shared) < 2:
                continue
            length = max(np.linalg.norm(p - q) for p in shared for q in shared)
            cos = np.clip(poly.normals[a] @ poly.normals[b], -1.0, 1.0)
            mean_width_term += length * math.acos(cos)
    return 1.0, mean_width_term / (2 * math.pi), surface_measure(poly) / 2, volume(poly)


def intrinsic_volumes(shape, n: int | None = None) -> ValuationVector:
    """Intrinsic volumes of a convex polytope, or of the hull of a point cloud.

    Point clouds may be lower dimensional (a shared edge, a single point);
    intrinsic volumes do not depend on the ambient space, so the cloud is
    projected onto its affine hull first.  An empty cloud is the empty set.
    """
    if isinstance(shape, ConvexPolytope):
        pts = np.asarray(shape.vertices)
        n = shape.dimension
    else:
        pts = np.atleast_2d(np.asarray(shape, dtype=float))
        n = pts.shape[1] if n is None else n
    if pts.size == 0:
        return ValuationVector(n, (0.0,) * (n + 1))
    k = _affine_rank(pts)
    if k == 0:
        vals = (1.0,)
    else:
        centered = pts - pts.mean(axis=0)
        basis = np.linalg.svd(centered, full_matrices=False)[2][:k]
        local = centered @ basis.T
        if k == 1:
            vals = (1.0, float(local.max() - local.min()))
        elif k == 2:
            hull = ConvexHull(local)
            vals = (1.0, hull.area / 2, hull.volume)
        elif k == 3:
            poly = shape if isinstance(shape, ConvexPolytope) else ConvexPolytope.from_vertices(local)
            vals = _intrinsic_volumes_3d(poly)
        else:
            raise GeometryError("intrinsic volumes implemented up to dimension 3")
    return ValuationVector(n, vals + (0.0,) * (n + 1 - len(vals)))


def boundary_valuations(poly: ConvexPolytope) -> ValuationVector:
    """Intrinsic volumes of the boundary surface of a convex polytope.

    The boundary is the body minus its relatively open interior, whose
    valuations pick up a factor (-1)^(n-i); hence
    ``mu_i(boundary) = (1 - (-1)^(n-i)) * mu_i(body)``.
    """
    body = intrinsic_volumes(poly)
    n = poly.dimension
    return ValuationVector(n, tuple((1 - (-1) ** (n - i)) * body[i] for i in range(n + 1)))


def valuation_additivity_check(a: ConvexPolytope, b: ConvexPolytope, index: int | None = None) -> float:
    """|mu(A u B) - mu(A) - mu(B) + mu(A n B)| for the ``index``-th intrinsic volume.

    ``index`` defaults to n (volume), which is evaluated for arbitrary unions;
    lower indices require the union to be convex.
    """
    n = a.dimension
    if b.dimension != n:
        raise GeometryError("dimension mismatch")
    i = n if index is None else index
    mu_a = intrinsic_volumes(a)[i]
    mu_b = intrinsic_volumes(b)[i]
    mu_ab = intrinsic_volumes(intersection_vertices(a, b), n)[i]
    union = PolyconvexSet([a, b])
    if i == n:
        mu_u = union_volume(union)
    else:
        hull_pts = np.vstack([a.vertices, b.vertices])
        hull = ConvexPolytope.from_vertices(hull_pts)
        if abs(volume(hull) - union_volume(union)) > 1e-9 * max(1.0, volume(hull)):
            raise ValueError("union is not convex; only the volume can be checked")
        mu_u = intrinsic_volumes(hull)[i]
    return abs(mu_u - mu_a - mu_b + mu_ab)


def sylvester_ratio(small: ValuationVector, large: ValuationVector, k: int) -> float:
    """Probability that a random k-flat meeting ``large`` also meets ``small``.

    The caller guarantees ``small`` is contained in ``large``.
    """
    n = large.dimension
    if small.dimension != n:
        raise ValueError("dimension mismatch")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}")
    denom = large[n - k]
    if denom <= 0:
        raise ZeroDivisionError("mu_{n-k} of the enclosing set is zero")
    ratio = small[n - k] / denom
    if 1.0 < ratio < 1.0 + 1e-9:
        log.warning("sylvester ratio %.17g exceeds 1 by rounding; clamped", ratio)
        ratio = 1.0
    return max(0.0, ratio)


def kinematic_coefficient(i: int, n: int) -> float:
    return omega(i) * omega(n - i) / (math.comb(n, i) * omega(n))


def kinematic_measure(a: ValuationVector, k: ValuationVector) -> float:
    """Principal kinematic formula: the motion integral of chi(A n gK).

    Rotations carry the probability Haar measure, translations Lebesgue
    measure.
    """
    n = a.dimension
    if k.dimension != n:
        raise ValueError("dimension mismatch")
    return sum(kinematic_coefficient(i, n) * a[i] * k[n - i] for i in range(n + 1))


class Variant(enum.Enum):
    PAPER_LITERAL = "paper"
    RADIUS_CORRECTED = "corrected"


@dataclass(frozen=True)
class PredictionInput:
    dimension: int
    boundary_measure: float
    delta: float
    d: float
    variant: Variant = Variant.PAPER_LITERAL

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.d >= self.delta:
            raise ValueError("bounding diameter must be >= delta")
        if not self.boundary_measure > 0:
            raise ValueError("boundary measure must be positive")
        object.__setattr__(self, "variant", Variant(self.variant))


def alpha(n: int) -> float:
    """Coefficient of the mu_{n-1} x mu_1 term of the kinematic formula."""
    return omega(n - 1) * omega(1) / (n * omega(n))


def predicted_success(p: PredictionInput) -> float:
    """Closed-form probability that a random step of length delta meets the
    obstacle boundary, given that it meets the bounding ball of diameter d.

    ``PAPER_LITERAL`` takes mu_{n-1} of the bounding ball as
    ``n * omega_n / (2 d)`` and mu_n as ``omega_n``; neither scales with d
    the way the intrinsic volumes of a ball of diameter d do.
    ``RADIUS_CORRECTED`` uses mu_{n-1} and mu_n of a ball of radius d/2.
    Neither variant is clamped to 1.
    """
    n, s, delta, d = p.dimension, p.boundary_measure, p.delta, p.d
    a = alpha(n)
    if p.variant is Variant.PAPER_LITERAL:
        return a / omega(n) * (s * delta / (a * n / (2 * d) * delta + 1.0))
    r = d / 2
    return a * s * delta / (a * mu_ball(n - 1, n, r) * delta + mu_ball(n, n, r))


# -- Crofton line estimator -------------------------------------------------------

def _line_segments(rng: np.random.Generator, count: int, center: np.ndarray, radius: float):
    theta = rng.random(count) * math.pi
    offset = (2 * rng.random(count) - 1) * radius
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    v = np.column_stack([-u[:, 1], u[:, 0]])
    foot = center + offset[:, None] * u
    return foot - 1.5 * radius * v, foot + 1.5 * radius * v


def line_crossings(shape, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Boundary crossings of chords ``p -> q`` whose ends lie outside ``shape``.

    A degenerate segment is crossed twice, as the limit of a thin body.
    """
    if isinstance(shape, Segment):
        a, b = shape.p, shape.q
        d = q - p
        normal = np.column_stack([-d[:, 1], d[:, 0]])
        sa = np.einsum("ij,ij->i", a - p, normal)
        sb = np.einsum("ij,ij->i", b - p, normal)
        return 2 * (sa * sb < 0).astype(int)
    lo, hi = clip_intervals(shape, p, q - p)
    return merged_components(lo, hi, 0.0, 1.0)[2]


def crofton_sample(shape, n_lines: int, rng_seed: int) -> tuple[float, float]:
    """Perimeter estimate and its standard error from random lines (2D).

    Lines are drawn from the motion-invariant measure restricted to lines
    meeting a reference disc of radius R around the shape: angle uniform in
    [0, pi), signed offset uniform in [-R, R].  That set of lines has
    measure 2 pi R and the invariant integral of the crossing count equals
    twice the curve length, so the frozen rescaling constant is
    ``perimeter = pi * R * mean(crossings)``.
    """
    if n_lines < 1:
        raise ValueError("n_lines must be >= 1")
    if isinstance(shape, Segment):
        if shape.dimension != 2:
            raise GeometryError("Crofton estimator is implemented for the plane")
        center = (shape.p + shape.q) / 2
        radius = shape.length / 2 * (1 + 1e-6) + 1e-12
    else:
        shape = PolyconvexSet.of(shape)
        if shape.dimension != 2:
            raise GeometryError("Crofton estimator is implemented for the plane")
        ball = bounding_ball(shape)
        center, radius = ball.center, ball.radius * (1 + 1e-6)
    total = 0.0
    total_sq = 0.0
    for block, count in rngmod.blocks(n_lines):
        g = rngmod.stream(rng_seed, rngmod.LINES, block)
        p, q = _line_segments(g, count, center, radius)
        c = line_crossings(shape, p, q).astype(float)
        total += c.sum()
        total_sq += (c ** 2).sum()
    mean = total / n_lines
    var = max(total_sq / n_lines - mean ** 2, 0.0)
    scale = math.pi * radius
    return float(scale * mean), float(scale * math.sqrt(var / n_lines))


def crofton_estimate(shape, n_lines: int, rng_seed: int) -> float:
    return crofton_sample(shape, n_lines, rng_seed)[0]


def line_hit_fraction(small, enclosing_radius: float, center, n_lines: int, rng_seed: int) -> tuple[float, float]:
    """Fraction of random lines meeting a disc that also meet ``small``."""
    center = np.asarray(center, dtype=float)
    hits = 0
    for block, count in rngmod.blocks(n_lines):
        g = rngmod.stream(rng_seed, rngmod.LINES, block)
        p, q = _line_segments(g, count, center, enclosing_radius)
        lo, hi = clip_intervals(small, p, q - p)
        hits += int((merged_components(lo, hi, 0.0, 1.0)[0] > 0).sum())
    frac = hits / n_lines
    return frac, math.sqrt(frac * (1 - frac) / n_lines)


def valuations_of(shapes: Sequence) -> list[ValuationVector]:
    return [intrinsic_volumes(s) for s in shapes]
