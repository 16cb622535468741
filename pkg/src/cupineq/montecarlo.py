"""Chunked Monte Carlo engine with deterministic streams.

The sample is cut into fixed-size chunks; chunk ``i`` draws from
``stream.chunk(i)``. Per-chunk (count, mean, M2) triples are merged in a fixed
binary tree, so results are bit-identical for any number of workers.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoisonedSampleError
from .measures import PointBatch, RngStream

MIN_COUNT = 1000
DEFAULT_CHUNK = 1 << 16

Sampler = Callable[[int, RngStream], PointBatch]
Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    count: int
    stream: RngStream | None = None
    exact: bool = False

    @property
    def se(self) -> float:
        return self.std_error

    @classmethod
    def exact_value(cls, value: float) -> MCEstimate:
        return cls(float(value), 0.0, 0, None, True)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "se": self.std_error, "count": self.count, "exact": self.exact}

    def scaled(self, factor: float) -> MCEstimate:
        return MCEstimate(
            self.mean * factor, self.std_error * abs(factor), self.count, self.stream, self.exact
        )


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> _Moments:
        if values.size == 0:
            return cls(0, 0.0, 0.0)
        mean = float(np.mean(values))
        return cls(values.size, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: _Moments) -> _Moments:
        # Chan et al. parallel update
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2)


def _tree_merge(parts: list[_Moments]) -> _Moments:
    while len(parts) > 1:
        merged = [a.merge(b) for a, b in zip(parts[0::2], parts[1::2])]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0] if parts else _Moments(0, 0.0, 0.0)


def _check_finite(name: str, values: np.ndarray, data: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (data.shape[0],):
        raise ValueError(
            f"integrand {name!r} must return one value per point, got shape {values.shape}"
        )
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise PoisonedSampleError(
            f"integrand {name!r} returned {values[i]} at point {data[i].tolist()}"
        )
    return values


def mc_estimate_many(
    integrands: Mapping[str, Integrand],
    sampler: Sampler,
    count: int,
    stream: RngStream,
    *,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> dict[str, MCEstimate]:
    """Estimate several expectations from one shared sample (common random numbers)."""
    if count < MIN_COUNT:
        raise DomainError(f"Monte Carlo needs at least {MIN_COUNT} samples, got {count}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size}")
    names = list(integrands)
    sizes = [min(chunk_size, count - s) for s in range(0, count, chunk_size)]

    def run_chunk(i: int) -> list[_Moments]:
        data = sampler(sizes[i], stream.chunk(i)).data
        return [_Moments.of(_check_finite(k, integrands[k](data), data)) for k in names]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_chunk = list(pool.map(run_chunk, range(len(sizes))))
    else:
        per_chunk = [run_chunk(i) for i in range(len(sizes))]

    out = {}
    for j, k in enumerate(names):
        m = _tree_merge([c[j] for c in per_chunk])
        var = m.m2 / (m.count - 1) if m.count > 1 else 0.0
        out[k] = MCEstimate(m.mean, math.sqrt(var / m.count), m.count, stream)
    return out


def mc_estimate(
    integrand: Integrand,
    sampler: Sampler,
    count: int,
    stream: RngStream,
    **kwargs,
) -> MCEstimate:
    return mc_estimate_many({"value": integrand}, sampler, count, stream, **kwargs)["value"]
