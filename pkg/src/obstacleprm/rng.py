"""Reproducible random streams keyed by (master seed, stream id)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# stream-id namespaces, so different consumers never share a stream
RAYS = 1
REPLICATION = 2
SEGMENT_DROP = 3
LINES = 4
MOTIONS = 5
UNIFORM = 6


@dataclass(frozen=True)
class SeededRng:
    master_seed: int

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master seed must be a 64-bit unsigned integer")

    def stream(self, *stream_id: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=tuple(int(k) for k in stream_id))
        return np.random.Generator(np.random.PCG64(ss))

    def derive_seed(self, *stream_id: int) -> int:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=tuple(int(k) for k in stream_id))
        return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(seed: int, *stream_id: int) -> np.random.Generator:
    return SeededRng(seed).stream(*stream_id)


def derive_seed(seed: int, *stream_id: int) -> int:
    return SeededRng(seed).derive_seed(*stream_id)


def uniform_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Isotropic unit vectors (normalised Gaussians)."""
    v = rng.standard_normal((count, n))
    norms = np.linalg.norm(v, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        v[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(v, axis=1)
    return v / norms[:, None]


def uniform_in_ball(rng: np.random.Generator, count: int, n: int, radius: float) -> np.ndarray:
    d = uniform_directions(rng, count, n)
    r = radius * rng.random(count) ** (1.0 / n)
    return d * r[:, None]


#: trials per random stream in batched estimators; fixed so that results do
#: not depend on how blocks are scheduled over workers
BLOCK = 1 << 16


def blocks(total: int, size: int = BLOCK):
    """(block_index, count) pairs covering ``total`` trials."""
    for b, start in enumerate(range(0, total, size)):
        yield b, min(size, total - start)
