"""Direct simulation of the lazy walk.

Random numbers come from a counter-based generator: walk ``i`` of a run
with seed ``s`` reads the splitmix64 sequence started at
``mix64(s + (i + 1) * golden)``. A histogram therefore depends only on
``(seed, n_samples)``, not on chunking, worker count or backend.

The one-step recursion also describes a queue (for instance a traffic jam
whose length grows by one with probability ``pr`` and shrinks with ``pl``);
the simulated absorption time is then the lifetime of a queue of length ``x``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .core import HopProbabilities, ParameterError, check_start

RNG_ALGORITHM = "splitmix64-substream-v1"
_SEED_MASK = (1 << 64) - 1
_CHUNK = 65536


class CounterStream:
    """Uniform variates of one substream, addressed by step number."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = int(seed) & _SEED_MASK
        self.index = int(index)
        self.key = _backend.kernels.stream_key(self.seed, self.index)
        self.position = 0

    def next_uniform(self) -> float:
        u = _backend.kernels.uniform(self.key, self.position)
        self.position += 1
        return u


def _check_params(params: HopProbabilities) -> None:
    if not params.strict:
        raise ParameterError("simulation needs strict (normalised) probabilities")


def simulate_one(x: int, params: HopProbabilities, t_cap: int, rng_stream: CounterStream) -> int | None:
    """Walk from ``x`` until it reaches 0 or ``t_cap`` steps have passed.

    Returns the absorption time, or None for a censored walk. Consumes one
    variate per step from ``rng_stream``; the step is right if ``u < pr``,
    left if ``u < pr + pl``, halt otherwise.
    """
    _check_params(params)
    check_start(x)
    if t_cap < 1:
        raise ParameterError("t_cap must be >= 1")
    if x == 0:
        return 0
    edge = params.pr + params.pl
    pos = x
    for step in range(1, t_cap + 1):
        u = rng_stream.next_uniform()
        if u < params.pr:
            pos += 1
        elif u < edge:
            pos -= 1
            if pos == 0:
                return step
    return None


@dataclass(frozen=True)
class EmpiricalPmf:
    x: int
    params: HopProbabilities
    t_cap: int
    n_samples: int
    counts: np.ndarray = field(repr=False)
    censored: int
    seed: int
    rng_algorithm: str = RNG_ALGORITHM

    def frequency(self, t: int) -> float:
        if t < 0 or t > self.t_cap:
            return 0.0
        return float(self.counts[t]) / self.n_samples

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_samples

    def to_bytes(self) -> bytes:
        """Canonical byte form of the histogram (little-endian int64 counts + censored)."""
        return self.counts.astype("<i8").tobytes() + int(self.censored).to_bytes(8, "little")

    def binomial_zscores(self, expected: np.ndarray) -> np.ndarray:
        """Per-bin ``(count - n p) / sqrt(n p (1 - p))`` against probabilities ``expected``."""
        n = self.n_samples
        p = np.asarray(expected, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.counts - n * p) / np.sqrt(n * p * (1.0 - p))


def empirical_pmf(
    x: int,
    params: HopProbabilities,
    n_samples: int,
    t_cap: int,
    seed: int,
    *,
    workers: int = 1,
) -> EmpiricalPmf:
    """Histogram of absorption times over ``n_samples`` independent walks.

    ``workers > 1`` splits the sample range across threads; the histogram is
    identical for any worker count.
    """
    _check_params(params)
    check_start(x)
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    if t_cap < 1:
        raise ParameterError("t_cap must be >= 1")
    seed = int(seed) & _SEED_MASK
    kern = _backend.kernels
    chunks = [(lo, min(lo + _CHUNK, n_samples)) for lo in range(0, n_samples, _CHUNK)]

    def run(bounds):
        counts = np.zeros(t_cap + 1, dtype=np.int64)
        censored = kern.simulate_range(x, params.pr, params.pl, t_cap, seed, bounds[0], bounds[1], counts)
        return counts, censored

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    counts = np.sum([c for c, _ in parts], axis=0).astype(np.int64)
    censored = int(sum(c for _, c in parts))
    counts.setflags(write=False)
    return EmpiricalPmf(x, params, t_cap, n_samples, counts, censored, seed)


def binomial_pass_rate(emp: EmpiricalPmf, expected: np.ndarray, *, sigma: float = 3.0, min_count: float = 25.0):
    """Fraction of bins with expected count >= ``min_count`` whose |z| <= ``sigma``.

    Returns ``(rate, n_bins)``.
    """
    expected = np.asarray(expected, dtype=float)
    mask = emp.n_samples * expected >= min_count
    if not mask.any():
        return math.nan, 0
    z = emp.binomial_zscores(expected)[mask]
    return float(np.mean(np.abs(z) <= sigma)), int(mask.sum())
