"""Closed-form first-hitting probabilities.

:func:`pmf` is the production path: a finite sum of non-negative terms,
each assembled as ``exp`` of a log-space product. :func:`pmf_via_2f1`
evaluates the same quantity through the terminating hypergeometric form and
is kept for cross-checking.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import _backend
from .core import (
    SIMPLEX_TOL,
    DomainError,
    HopProbabilities,
    ParameterError,
    check_start,
    check_time,
    log_factorial,
    log_factorial_table,
    xlogy,
)
from .hypergeom import gauss_2f1_terminating_log


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    DP = "dp"
    INTEGRAL = "integral"
    MONTE_CARLO = "monte_carlo"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class PmfQuery:
    x: int
    t: int
    params: HopProbabilities

    def __post_init__(self):
        check_start(self.x)
        check_time(self.t)


@dataclass(frozen=True)
class PmfValue:
    value: float
    method: Method
    log_value: float

    @classmethod
    def from_log(cls, log_value: float, method: Method) -> "PmfValue":
        return cls(math.exp(log_value), method, log_value)

    @classmethod
    def zero(cls, method: Method) -> "PmfValue":
        return cls(0.0, method, -math.inf)

    def __float__(self) -> float:
        return self.value


def _boundary(x: int, t: int, method: Method) -> PmfValue | None:
    if x == 0:
        return PmfValue(1.0, method, 0.0) if t == 0 else PmfValue.zero(method)
    if t < x:
        return PmfValue.zero(method)
    return None


def classic_pmf(x: int, t: int, pr: float, pl: float) -> PmfValue:
    """First-hitting probability of the walk without halting (``pr + pl = 1``).

    ``(x/t) C(t, (t+x)/2) pr**((t-x)/2) pl**((t+x)/2)`` for same-parity
    ``t >= x``, zero otherwise.
    """
    x, t = check_start(x), check_time(t)
    if pr < 0 or pl < 0 or abs(pr + pl - 1.0) > SIMPLEX_TOL:
        raise ParameterError(f"classic walk needs pr + pl = 1, got {pr} + {pl}")
    hit = _boundary(x, t, Method.CLOSED_FORM)
    if hit is not None:
        return hit
    if (t - x) % 2:
        return PmfValue.zero(Method.CLOSED_FORM)
    up, down = (t - x) // 2, (t + x) // 2
    log_value = (
        math.log(x)
        + log_factorial(t - 1)
        - log_factorial(down)
        - log_factorial(up)
        + xlogy(up, pr)
        + xlogy(down, pl)
    )
    if log_value == -math.inf:
        return PmfValue.zero(Method.CLOSED_FORM)
    return PmfValue.from_log(log_value, Method.CLOSED_FORM)


def _logs(params: HopProbabilities) -> tuple[float, float, float]:
    return tuple(math.log(p) if p > 0 else -math.inf for p in params.as_tuple())


def pmf(q: PmfQuery) -> PmfValue:
    """Probability that the walk started at ``q.x`` first hits 0 at time ``q.t``.

    Sums ``pr**k pl**(x+k) pp**(t-x-2k) x (t-1)! / ((x+k)! k! (t-x-2k)!)``
    over ``k = 0 .. (t-x)//2``. With ``pp = 0`` only the ``2k = t - x`` term
    survives (``0**0 = 1``) and the result is :func:`classic_pmf`.
    """
    x, t = q.x, q.t
    hit = _boundary(x, t, Method.CLOSED_FORM)
    if hit is not None:
        return hit
    lpr, lpl, lpp = _logs(q.params)
    value, log_value = _backend.kernels.ruin_sum(x, t, lpr, lpl, lpp, log_factorial_table(t))
    return PmfValue(value, Method.CLOSED_FORM, log_value)


def pmf_at(x: int, t: int, params: HopProbabilities) -> float:
    """Shorthand for ``pmf(PmfQuery(x, t, params)).value``."""
    return pmf(PmfQuery(x, t, params)).value


def log_pmf_via_2f1(x: int, t: int, pr: float, pl: float, pp: float) -> float:
    """Log of ``pl**x pp**(t-x) C(t-1, x-1) F((x-t)/2, (x-t+1)/2; x+1; 4 pr pl / pp**2)``.

    No simplex constraint: the hypergeometric form holds for arbitrary
    non-negative ``pr, pl`` and positive ``pp``. Requires ``1 <= x <= t``.
    """
    z = 4.0 * pr * pl / (pp * pp)
    sign, log_f = gauss_2f1_terminating_log((x - t) / 2, (x - t + 1) / 2, x + 1, z)
    if sign <= 0:
        # the series has non-negative terms for z >= 0
        return -math.inf
    log_binom = log_factorial(t - 1) - log_factorial(x - 1) - log_factorial(t - x)
    return xlogy(x, pl) + xlogy(t - x, pp) + log_binom + log_f


def pmf_via_2f1(q: PmfQuery) -> PmfValue:
    """Same probability as :func:`pmf`, through the terminating 2F1.

    Raises
    ------
    DomainError
        If ``pp == 0``; the series argument ``4 pr pl / pp**2`` is undefined.
    """
    if q.params.pp == 0.0:
        raise DomainError("pmf_via_2f1 needs pp > 0; use pmf for the non-halting walk")
    if q.x == 0:
        raise DomainError("pmf_via_2f1 needs x >= 1")
    if q.t < q.x:
        return PmfValue.zero(Method.CLOSED_FORM)
    p = q.params
    log_value = log_pmf_via_2f1(q.x, q.t, p.pr, p.pl, p.pp)
    if log_value == -math.inf:
        return PmfValue.zero(Method.CLOSED_FORM)
    return PmfValue.from_log(log_value, Method.CLOSED_FORM)
