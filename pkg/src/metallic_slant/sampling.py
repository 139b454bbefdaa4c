"""Seeded sampling of chart points and random tangent directions."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError

EDGE_MARGIN = 1e-3


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-9
    fd: float = 1e-6
    angle: float = 1e-6


@dataclass(frozen=True)
class SamplingPlan:
    seed: int = 20240101
    count: int = 100
    dirs: int = 20
    tol: Tolerances = Tolerances()

    def __post_init__(self):
        if self.count < 1 or self.dirs < 1:
            raise InputError("sample counts must be at least 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InputError("seed must fit in an unsigned 64-bit integer")

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per named stream, so checks don't perturb each other."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(self.seed), int(stream)])))

    def with_(self, **kw) -> "SamplingPlan":
        return replace(self, **kw)


def sample_points(box, count: int, rng: np.random.Generator, margin: float = EDGE_MARGIN) -> np.ndarray:
    """Uniform points in ``box`` (a list of (lo, hi)), keeping ``margin * width`` off each edge."""
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    width = hi - lo
    lo = lo + margin * width
    hi = hi - margin * width
    return lo + (hi - lo) * rng.random((count, len(box)))


def unit_vectors(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` random unit vectors as the columns of a dim x count array."""
    V = rng.standard_normal((dim, count))
    return V / np.linalg.norm(V, axis=0)
