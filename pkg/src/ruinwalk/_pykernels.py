"""Pure Python / numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used whenever
the compiled extension is unavailable. Kernels take plain floats and arrays;
validation happens in the calling modules.
"""
from __future__ import annotations

import math

import numpy as np

NAME = "python"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def _xlog(n: np.ndarray, logp: float) -> np.ndarray:
    # n * log(p) with 0 * log(0) = 0
    if logp == -math.inf:
        return np.where(n == 0, 0.0, -math.inf)
    return n * logp


def _compensated(values: np.ndarray) -> float:
    # error-free accumulation; at least as accurate as a Kahan loop
    return math.fsum(values.tolist())


def ruin_sum(x: int, t: int, lpr: float, lpl: float, lpp: float, lf: np.ndarray):
    """Finite k-sum for the first-hitting probability, in log space.

    Requires ``1 <= x <= t`` and ``lf[n] = log(n!)`` for ``n <= t``.
    Returns ``(value, log_value)``.
    """
    k = np.arange((t - x) // 2 + 1)
    rest = t - x - 2 * k
    logs = (
        _xlog(k, lpr)
        + _xlog(x + k, lpl)
        + _xlog(rest, lpp)
        + (math.log(x) + lf[t - 1])
        - lf[x + k]
        - lf[k]
        - lf[rest]
    )
    top = float(logs.max())
    if top == -math.inf:
        return 0.0, -math.inf
    ratio = _compensated(np.exp(logs - top))
    return math.exp(top) * ratio, top + math.log(ratio)


def hyp_terminating(a: float, b: float, c: float, z: float, n: int):
    """Sum of the first ``n + 1`` terms of 2F1(a, b; c; z).

    Terms are built from their successive ratios in log-magnitude form with
    explicit sign tracking, then summed relative to the largest one.
    Returns ``(sign, log_abs)``; a zero sum gives ``(0, -inf)``.
    """
    if n == 0 or z == 0.0:
        return 1.0, 0.0
    j = np.arange(n, dtype=np.float64)
    ratio = (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z
    if np.any(ratio == 0.0):
        n_live = int(np.argmax(ratio == 0.0))
        ratio = ratio[:n_live]
    logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(ratio)))))
    signs = np.concatenate(([1.0], np.cumprod(np.sign(ratio))))
    top = float(logs.max())
    total = _compensated(signs * np.exp(logs - top))
    if total == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, total), top + math.log(abs(total))


def dp_run(
    x_max: int, t_max: int, pr: float, pl: float, pp: float, grid=None, width: int | None = None
) -> np.ndarray:
    """Iterate the one-step recursion from t = 0 to t_max.

    The working column spans ``0..W`` with ``W = max(x_max, t_max) + 1`` so
    nothing outside it can reach ``x <= x_max`` by ``t_max``. A smaller
    ``width`` (at least ``x_max + 1``) puts an absorbing wall at ``width + 1``.
    When ``grid`` of shape ``(x_max + 1, t_max + 1)`` is given every column is
    stored in it. Returns the final column restricted to ``0..x_max``.
    """
    full = max(x_max, t_max) + 1
    width = full if width is None else min(max(width, x_max + 1), full)
    cur = np.zeros(width + 2)
    nxt = np.zeros(width + 2)
    cur[0] = 1.0
    if grid is not None:
        grid[:, 0] = cur[: x_max + 1]
    for t in range(t_max):
        # column t is zero beyond x = t
        hi = min(t + 1, width)
        nxt[0] = 0.0
        nxt[1 : hi + 1] = pr * cur[2 : hi + 2] + pl * cur[0:hi] + pp * cur[1 : hi + 1]
        cur, nxt = nxt, cur
        if grid is not None:
            grid[:, t + 1] = cur[: x_max + 1]
    return cur[: x_max + 1].copy()


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, index: int) -> int:
    return mix64(seed + (index + 1) * GOLDEN)


def uniform(key: int, step: int) -> float:
    return (mix64(key + (step + 1) * GOLDEN) >> 11) * _INV53


def walk_one(x: int, pr: float, pl: float, t_cap: int, key: int) -> int:
    """Absorption time of one walk on substream ``key``; -1 when censored."""
    if x == 0:
        return 0
    edge = pr + pl
    pos = x
    for j in range(t_cap):
        u = uniform(key, j)
        if u < pr:
            pos += 1
        elif u < edge:
            pos -= 1
            if pos == 0:
                return j + 1
    return -1


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def simulate_range(
    x: int, pr: float, pl: float, t_cap: int, seed: int, start: int, stop: int, counts: np.ndarray
) -> int:
    """Run samples ``start..stop-1`` and add absorption times into ``counts``.

    Sample ``i`` draws from substream ``stream_key(seed, i)`` so the result
    does not depend on how the index range is split. Returns the number of
    censored walks.
    """
    n = stop - start
    if n <= 0:
        return 0
    if x == 0:
        counts[0] += n
        return 0
    idx = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = _mix64_array(
            np.uint64(seed & MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        )
    pos = np.full(n, x, dtype=np.int64)
    edge = pr + pl
    for j in range(t_cap):
        step = np.uint64(((j + 1) * GOLDEN) & MASK64)
        with np.errstate(over="ignore"):
            u = (_mix64_array(keys + step) >> np.uint64(11)).astype(np.float64) * _INV53
        pos += (u < pr).astype(np.int64)
        pos -= ((u >= pr) & (u < edge)).astype(np.int64)
        hit = pos == 0
        n_hit = int(np.count_nonzero(hit))
        if n_hit:
            counts[j + 1] += n_hit
            keep = ~hit
            pos = pos[keep]
            keys = keys[keep]
            if pos.size == 0:
                return 0
    return int(pos.size)
