"""Monte Carlo estimators and the experiment driver.

Randomness is organised in fixed-size blocks, each drawing from its own
``(seed, namespace, block)`` stream.  Blocks may run on any number of
threads; totals are sums over blocks, so results never depend on the
worker count.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import rng as rngmod
from .geometry import (
    GeometryError,
    PolyconvexSet,
    bounding_ball,
    boundary_measure,
    diameter,
    segments_hit_boundary,
    union_volume,
    clip_intervals,
    merged_components,
)
from .obprm import ObprmParams, generate_nodes
from .shapes import load_shape
from .valuations import PredictionInput, Variant, predicted_success

Z95 = float(stats.norm.ppf(0.975))


@dataclass(frozen=True)
class TrialStats:
    trials: int
    successes: float
    point_estimate: float
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    def as_dict(self) -> dict:
        return {"trials": self.trials, "successes": self.successes,
                "point_estimate": self.point_estimate,
                "ci_low": self.ci_low, "ci_high": self.ci_high}


def wilson(successes: int, trials: int, z: float = Z95) -> TrialStats:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return TrialStats(trials, successes, p, max(0.0, min(p, center - half)), min(1.0, max(p, center + half)))


def t_interval(values, level: float = 0.95) -> TrialStats:
    """Mean of per-replication rates with a Student-t interval."""
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    if len(v) < 2 or np.all(v == v[0]):
        return TrialStats(len(v), float(v.sum()), mean, mean, mean)
    half = float(stats.t.ppf(0.5 + level / 2, len(v) - 1) * v.std(ddof=1) / math.sqrt(len(v)))
    return TrialStats(len(v), float(v.sum()), mean, max(0.0, mean - half), min(1.0, mean + half))


def _map_blocks(fn, jobs, threads: int):
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


# -- segment drops ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DropSetup:
    """Conditioning ball B_d for random segment drops."""

    center: np.ndarray
    d: float
    delta: float

    @classmethod
    def for_shape(cls, shape, delta: float, bounding_diameter: float | None = None, center=None):
        if not delta > 0:
            raise ValueError("delta must be positive")
        shape = PolyconvexSet.of(shape)
        d = diameter(shape) + 2 * delta if bounding_diameter is None else float(bounding_diameter)
        c = bounding_ball(shape).center if center is None else np.asarray(center, dtype=float)
        return cls(c, d, delta)


def _propose(g: np.random.Generator, count: int, setup: DropSetup, n: int):
    r = setup.d / 2
    mid = setup.center + rngmod.uniform_in_ball(g, count, n, r + setup.delta / 2)
    half = 0.5 * setup.delta * rngmod.uniform_directions(g, count, n)
    p, q = mid - half, mid + half
    # distance from the ball center to each segment
    u = q - p
    s = np.clip(np.einsum("ij,ij->i", setup.center - p, u) / (setup.delta ** 2), 0.0, 1.0)
    dist = np.linalg.norm(p + s[:, None] * u - setup.center, axis=1)
    keep = dist <= r
    return p[keep], q[keep]


def drop_segments(g: np.random.Generator, count: int, setup: DropSetup, n: int):
    """``count`` segments drawn from the kinematic measure, conditioned on B_d."""
    ps, qs, have = [], [], 0
    while have < count:
        p, q = _propose(g, max(64, int(1.3 * (count - have))), setup, n)
        ps.append(p)
        qs.append(q)
        have += len(p)
    return np.vstack(ps)[:count], np.vstack(qs)[:count]


def drop_segment_trial(shape, delta: float, rng_stream: np.random.Generator, *,
                       setup: DropSetup | None = None) -> bool:
    shape = PolyconvexSet.of(shape)
    setup = setup or DropSetup.for_shape(shape, delta)
    p, q = drop_segments(rng_stream, 1, setup, shape.dimension)
    return bool(segments_hit_boundary(shape, p, q)[0])


def estimate_hit_probability(shape, delta: float, trials: int, seed: int, *,
                             bounding_diameter: float | None = None, center=None,
                             threads: int = 1) -> TrialStats:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    shape = PolyconvexSet.of(shape)
    setup = DropSetup.for_shape(shape, delta, bounding_diameter, center)

    def run(job):
        block, count = job
        g = rngmod.stream(seed, rngmod.SEGMENT_DROP, block)
        p, q = drop_segments(g, count, setup, shape.dimension)
        return int(segments_hit_boundary(shape, p, q).sum())

    hits = sum(_map_blocks(run, list(rngmod.blocks(trials)), threads))
    return wilson(hits, trials)


def kinematic_integral(shape, segment_length: float, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo value of the motion integral of #(boundary n gK) for a segment K.

    Translations are uniform over a box that contains every placement
    touching the shape; rotations are isotropic (probability measure).
    Returns ``(estimate, standard_error)``.
    """
    shape = PolyconvexSet.of(shape)
    n = shape.dimension
    verts = shape.vertices
    lo = verts.min(axis=0) - segment_length / 2
    hi = verts.max(axis=0) + segment_length / 2
    box_measure = float(np.prod(hi - lo))
    total = total_sq = 0.0
    for block, count in rngmod.blocks(samples):
        g = rngmod.stream(seed, rngmod.MOTIONS, block)
        mid = lo + (hi - lo) * g.random((count, n))
        half = 0.5 * segment_length * rngmod.uniform_directions(g, count, n)
        p = mid - half
        a, b = clip_intervals(shape, p, 2 * half)
        c = merged_components(a, b, 0.0, 1.0)[2].astype(float)
        total += c.sum()
        total_sq += (c ** 2).sum()
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    return float(box_measure * mean), float(box_measure * math.sqrt(var / samples))


# -- OBPRM replication -----------------------------------------------------------------

def replicate_rates(shape, params: ObprmParams, replications: int, seed: int, threads: int = 1) -> list[float]:
    if replications < 1:
        raise ValueError("replications must be >= 1")
    shape = PolyconvexSet.of(shape)

    def run(r):
        s = rngmod.derive_seed(seed, rngmod.REPLICATION, r)
        return generate_nodes(shape, params, s, trace_crossings=False).success_rate

    return _map_blocks(run, range(replications), threads)


def replicate_obprm(shape, params: ObprmParams, replications: int, seed: int, threads: int = 1) -> TrialStats:
    return t_interval(replicate_rates(shape, params, replications, seed, threads))


# -- experiments -----------------------------------------------------------------------

class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    obstacles: tuple
    delta: float
    rays: int
    ray_length: float | str
    replications: int
    drop_trials: int
    seed: int
    conditioning: str = "per-obstacle"
    base_dir: str = "."
    source_text: str | None = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".", source_text=None) -> "ExperimentConfig":
        try:
            cfg = cls(
                obstacles=tuple(raw["obstacles"]),
                delta=float(raw["delta"]),
                rays=int(raw["rays"]),
                ray_length=raw.get("ray_length", "auto"),
                replications=int(raw["replications"]),
                drop_trials=int(raw["drop_trials"]),
                seed=int(raw["seed"]),
                conditioning=raw.get("conditioning", "per-obstacle"),
                base_dir=str(base_dir),
                source_text=source_text,
            )
        except KeyError as exc:
            raise ExperimentError(f"config is missing field {exc.args[0]!r}") from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        text = path.read_text()
        return cls.from_dict(json.loads(text), path.parent, text)

    def validate(self):
        if not self.obstacles:
            raise ExperimentError("config lists no obstacles")
        if not self.delta > 0:
            raise ExperimentError("delta must be positive")
        if self.rays < 1 or self.replications < 1 or self.drop_trials < 1:
            raise ExperimentError("rays, replications and drop_trials must be >= 1")
        if self.ray_length != "auto" and not float(self.ray_length) > self.delta:
            raise ExperimentError("ray_length must be 'auto' or exceed delta")
        if self.conditioning not in ("per-obstacle", "common"):
            raise ExperimentError("conditioning must be 'per-obstacle' or 'common'")
        if not 0 <= self.seed < 2 ** 64:
            raise ExperimentError("seed must be a 64-bit unsigned integer")

    def echo(self) -> dict:
        return {"obstacles": list(self.obstacles), "delta": self.delta, "rays": self.rays,
                "ray_length": self.ray_length, "replications": self.replications,
                "drop_trials": self.drop_trials, "seed": self.seed,
                "conditioning": self.conditioning}


@dataclass
class ObstacleResult:
    name: str
    dimension: int
    volume: float
    boundary: float
    diameter: float
    bounding_diameter: float
    ray_length: float
    predicted_paper: float
    predicted_corrected: float
    obprm: TrialStats
    drop: TrialStats
    obprm_stream: str
    drop_stream: str

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "geometry": {"dimension": self.dimension, "volume": self.volume,
                         "boundary": self.boundary, "diameter": self.diameter,
                         "bounding_diameter": self.bounding_diameter},
            "ray_length": self.ray_length,
            "predicted": {"paper": self.predicted_paper, "corrected": self.predicted_corrected,
                          "paper_exceeds_one": self.predicted_paper > 1,
                          "corrected_exceeds_one": self.predicted_corrected > 1},
            "obprm": dict(self.obprm.as_dict(), stream=self.obprm_stream),
            "drop": dict(self.drop.as_dict(), stream=self.drop_stream),
        }


REPORT_NOTE = (
    "Acceptance target is the ordering of success estimates by boundary measure; "
    "absolute rates depend on the chosen ray length and obstacle shapes. "
    "obprm rates are per-ray success fractions averaged over replications."
)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    obstacles: list
    timestamps: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        """Deterministic content; wall-clock timestamps are kept out of it."""
        return {"note": REPORT_NOTE, "config": self.config.echo(),
                "config_text": self.config.source_text, "seed": self.config.seed,
                "obstacles": [o.as_dict() for o in self.obstacles]}


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    import datetime

    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    shapes = []
    for i, rel in enumerate(config.obstacles):
        path = Path(config.base_dir) / rel
        try:
            shapes.append((Path(rel).stem, load_shape(path)))
        except (GeometryError, OSError, ValueError) as exc:
            raise ExperimentError(f"obstacle {i} ({rel}): {exc}") from exc
    geo = [(diameter(s), bounding_ball(s)) for _, s in shapes]
    common_d = max(d for d, _ in geo) + 2 * config.delta
    results = []
    for i, (name, shape) in enumerate(shapes):
        diam, ball = geo[i]
        d = common_d if config.conditioning == "common" else diam + 2 * config.delta
        center = np.zeros(shape.dimension) if config.conditioning == "common" else ball.center
        if config.conditioning == "common" and np.linalg.norm(ball.center) + ball.radius > d / 2 + 1e-9:
            raise ExperimentError(f"obstacle {i} is not inside the common ball centred at the origin")
        boundary = boundary_measure(shape)
        l = diam + 2 * config.delta if config.ray_length == "auto" else float(config.ray_length)
        pred = {v: predicted_success(PredictionInput(shape.dimension, boundary, config.delta, d, v))
                for v in Variant}
        params = ObprmParams(config.rays, l, config.delta)
        obprm_seed = rngmod.derive_seed(config.seed, rngmod.REPLICATION, i)
        drop_seed = rngmod.derive_seed(config.seed, rngmod.SEGMENT_DROP, i)
        results.append(ObstacleResult(
            name=name, dimension=shape.dimension, volume=union_volume(shape), boundary=boundary,
            diameter=diam, bounding_diameter=d, ray_length=l,
            predicted_paper=pred[Variant.PAPER_LITERAL], predicted_corrected=pred[Variant.RADIUS_CORRECTED],
            obprm=replicate_obprm(shape, params, config.replications, obprm_seed, threads),
            drop=estimate_hit_probability(shape, config.delta, config.drop_trials, drop_seed,
                                          bounding_diameter=d, center=center, threads=threads),
            obprm_stream=f"replication/{i}", drop_stream=f"segment_drop/{i}",
        ))
    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return ExperimentReport(config, results, {"started": started, "finished": finished,
                                              "threads": threads, "pid": os.getpid()})
