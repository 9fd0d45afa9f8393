"""Sparse random XOR constraints.

Each variable enters a constraint independently with probability ``lam``;
the parity bit is a fair coin.  Randomness comes from counter-based Philox
streams keyed by ``(seed, stream_id)`` so that any derived stream can be
regenerated on its own.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .formula import XorConstraint


@dataclass(frozen=True)
class XorDistribution:
    m: int
    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam <= 0.5:
            raise ValueError(f"lambda must lie in (0, 1/2], got {self.lam}")
        if self.m < 1:
            raise ValueError("m must be positive")

    @property
    def mean_length(self) -> float:
        return self.m * self.lam


@dataclass(frozen=True)
class SeededRng:
    seed: int
    stream_id: tuple[int, ...] = ()

    def __post_init__(self):
        sid = self.stream_id
        if isinstance(sid, int):
            sid = (sid,)
        object.__setattr__(self, "stream_id", tuple(int(i) for i in sid))
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_entropy(cls) -> "SeededRng":
        return cls(secrets.randbits(64))

    def spawn(self, index: int) -> "SeededRng":
        return SeededRng(self.seed, self.stream_id + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(ss))


RngLike = Union[SeededRng, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    return rng.generator() if isinstance(rng, SeededRng) else rng


def draw_block(m: int, lam: float, s: int, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Raw draw of ``s`` constraints: parity bits (s,) and inclusion masks (s, m)."""
    parity = gen.integers(0, 2, size=s, dtype=np.uint8)
    mask = gen.random((s, m)) < lam
    return parity, mask


def _to_constraints(parity: np.ndarray, mask: np.ndarray) -> list[XorConstraint]:
    return [
        XorConstraint((np.flatnonzero(row) + 1).tolist(), int(p))
        for p, row in zip(parity, mask)
    ]


def sample_constraints(dist: XorDistribution, s: int, rng: RngLike) -> list[XorConstraint]:
    if s < 1:
        raise ValueError("s must be >= 1")
    parity, mask = draw_block(dist.m, dist.lam, s, as_generator(rng))
    return _to_constraints(parity, mask)


def sample_constraint(dist: XorDistribution, rng: RngLike) -> XorConstraint:
    return sample_constraints(dist, 1, rng)[0]


def estimate_joint_survival(
    sigma: Sequence[int],
    sigma2: Sequence[int],
    s: int,
    lam: float,
    trials: int,
    rng: RngLike,
) -> float:
    """Fraction of trials in which both assignments satisfy all ``s`` fresh constraints."""
    if len(sigma) != len(sigma2):
        raise ValueError("assignments differ in length")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gen = as_generator(rng)
    m = len(sigma)
    a = np.asarray(sigma, dtype=bool)
    b = np.asarray(sigma2, dtype=bool)
    hits = 0
    chunk = max(1, min(trials, (1 << 22) // max(1, s * m)))
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        parity = gen.integers(0, 2, size=(n, s), dtype=np.uint8).astype(bool)
        mask = gen.random((n, s, m)) < lam
        pa = (np.count_nonzero(mask & a, axis=2) & 1).astype(bool) == parity
        pb = (np.count_nonzero(mask & b, axis=2) & 1).astype(bool) == parity
        hits += int(np.count_nonzero((pa & pb).all(axis=1)))
        done += n
    return hits / trials
