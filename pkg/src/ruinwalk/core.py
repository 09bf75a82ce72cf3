"""Parameter objects, error types and small numeric helpers shared by every module.

The walker hops right with probability ``pr``, left with ``pl`` and stays put
with ``pp``. All quantities in the package are expressed through a
:class:`HopProbabilities` instance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

SIMPLEX_TOL = 1e-12

# log(n!) is exact-from-integers up to this bound; lgamma beyond
_EXACT_LOG_FACTORIAL_MAX = 170


class RuinError(Exception):
    """Base class. ``code`` is the stable identifier reported by the CLI."""

    code = "ruin_error"


class NegativeProbability(RuinError, ValueError):
    code = "negative_probability"


class SimplexViolation(RuinError, ValueError):
    code = "simplex_violation"


class ParameterError(RuinError, ValueError):
    code = "parameter_error"


class DomainError(RuinError, ValueError):
    code = "domain_error"


class NonTerminatingSeries(RuinError, ValueError):
    code = "non_terminating_series"


class CapacityError(RuinError, MemoryError):
    code = "capacity_error"


class DivergentMoment(RuinError, ArithmeticError):
    code = "divergent_moment"


@dataclass(frozen=True)
class HopProbabilities:
    """Hop probabilities of the lazy walk.

    Build instances through :func:`validate` (or :meth:`from_pair`), which
    enforces the constraints; the constructor itself does no checking.
    """

    pr: float
    pl: float
    pp: float
    strict: bool = True

    @classmethod
    def from_pair(cls, pr: float, pl: float, pp: float | None = None) -> "HopProbabilities":
        """Strict triple with ``pp`` inferred as ``1 - pr - pl`` when omitted."""
        if pp is None:
            pp = 1.0 - pr - pl
            # clean up rounding noise such as 1 - 0.7 - 0.3 = 5.5e-17
            if abs(pp) <= SIMPLEX_TOL:
                pp = 0.0
        return validate(pr, pl, pp, strict=True)

    @property
    def delta_p(self) -> float:
        return self.pl - self.pr

    @property
    def decay_rate(self) -> float:
        return self.pp + 2.0 * math.sqrt(self.pr * self.pl)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pr, self.pl, self.pp)

    def as_dict(self) -> dict[str, float]:
        return {"pr": self.pr, "pl": self.pl, "pp": self.pp}


def validate(pr: float, pl: float, pp: float, strict: bool = True) -> HopProbabilities:
    """Check a (pr, pl, pp) triple and wrap it.

    In strict mode the triple must lie on the probability simplex to within
    ``SIMPLEX_TOL``. Non-strict mode only requires non-negative entries; it
    exists for evaluating the closed forms at formal parameter values such as
    ``pr = z/4, pl = pp = 1``.
    """
    values = (float(pr), float(pl), float(pp))
    for name, v in zip(("pr", "pl", "pp"), values):
        if not math.isfinite(v):
            raise ParameterError(f"{name}={v!r} is not finite")
        if v < 0.0:
            raise NegativeProbability(f"{name}={v!r} is negative")
    if strict:
        if any(v > 1.0 for v in values):
            raise SimplexViolation(f"probabilities {values} exceed 1")
        total = math.fsum(values)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise SimplexViolation(f"pr + pl + pp = {total!r}, expected 1")
    return HopProbabilities(*values, strict=strict)


def check_start(x: int) -> int:
    if isinstance(x, bool) or int(x) != x or x < 0:
        raise ParameterError(f"start position must be a non-negative integer, got {x!r}")
    return int(x)


def check_time(t: int) -> int:
    if isinstance(t, bool) or int(t) != t or t < 0:
        raise ParameterError(f"time index must be a non-negative integer, got {t!r}")
    return int(t)


@lru_cache(maxsize=None)
def _small_log_factorials() -> tuple[float, ...]:
    return tuple(math.log(math.factorial(n)) for n in range(_EXACT_LOG_FACTORIAL_MAX + 1))


def log_factorial(n: int) -> float:
    """Natural log of ``n!``.

    Small arguments go through the exact integer factorial, larger ones
    through ``math.lgamma``; both are accurate to a few ulp.
    """
    if n < 0:
        raise ParameterError(f"log_factorial needs n >= 0, got {n}")
    n = int(n)
    if n <= _EXACT_LOG_FACTORIAL_MAX:
        return _small_log_factorials()[n]
    return math.lgamma(n + 1.0)


_table = np.array(_small_log_factorials(), dtype=np.float64)
_table.setflags(write=False)


def log_factorial_table(n_max: int) -> np.ndarray:
    """Array ``a`` with ``a[n] = log(n!)`` for ``0 <= n <= n_max``.

    The table grows on demand and is shared; callers must not mutate it.
    """
    global _table
    if n_max >= _table.size:
        size = max(n_max + 1, 2 * _table.size)
        extra = np.array(
            [math.lgamma(n + 1.0) for n in range(_table.size, size)], dtype=np.float64
        )
        grown = np.concatenate([_table, extra])
        grown.setflags(write=False)
        _table = grown
    return _table


def xlogy(n: float, p: float) -> float:
    """``n * log(p)`` with the convention ``0 * log(0) = 0`` (so ``0**0 = 1``)."""
    if n == 0:
        return 0.0
    if p == 0.0:
        return -math.inf
    return n * math.log(p)


def kahan_sum(values: Iterable[float]) -> float:
    """Compensated (Neumaier) summation in iteration order."""
    total = 0.0
    comp = 0.0
    for v in values:
        s = total + v
        if abs(total) >= abs(v):
            comp += (total - s) + v
        else:
            comp += (v - s) + total
        total = s
    return total + comp
