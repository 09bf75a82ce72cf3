"""Terminating Gauss hypergeometric series and the identities built on them.

Only the polynomial (terminating) case of 2F1 is evaluated in production.
The ``*_gap`` functions evaluate both sides of an identity and report the
discrepancy; the test suite uses them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import mpmath

from . import _backend
from .core import DomainError, NonTerminatingSeries, ParameterError


def _nonpositive_int(v: float) -> int | None:
    """``-v`` when ``v`` is a non-positive integer, else None."""
    if v <= 0 and float(v).is_integer():
        return int(-v)
    return None


@dataclass(frozen=True)
class TerminatingSeriesSpec:
    """Parameters of a terminating 2F1 together with its number of terms."""

    a: float
    b: float
    c: float
    z: float
    term_count: int

    @classmethod
    def build(cls, a: float, b: float, c: float, z: float, terms: int | None = None):
        """Find where the series stops, or use an explicit truncation ``terms``."""
        if terms is None:
            stops = [n for n in (_nonpositive_int(a), _nonpositive_int(b)) if n is not None]
            if not stops:
                raise NonTerminatingSeries(f"neither a={a} nor b={b} is a non-positive integer")
            terms = min(stops) + 1
        elif terms < 1:
            raise ParameterError("explicit truncation needs at least one term")
        c_pole = _nonpositive_int(c)
        if c_pole is not None and c_pole < terms - 1:
            raise DomainError(f"c={c} hits a pole before the series terminates")
        return cls(float(a), float(b), float(c), float(z), int(terms))


def pochhammer(alpha: float, k: int) -> float:
    """Rising factorial ``alpha (alpha+1) ... (alpha+k-1)``; 1 for ``k = 0``."""
    if k < 0:
        raise ParameterError(f"pochhammer needs k >= 0, got {k}")
    out = 1.0
    for i in range(k):
        out *= alpha + i
    return out


def gauss_2f1_terminating_log(a: float, b: float, c: float, z: float, terms: int | None = None):
    """``(sign, log|F|)`` of a terminating 2F1, safe against overflow.

    Terms are summed in increasing ``k`` with compensation.
    """
    spec = TerminatingSeriesSpec.build(a, b, c, z, terms)
    return _backend.kernels.hyp_terminating(spec.a, spec.b, spec.c, spec.z, spec.term_count - 1)


def gauss_2f1_terminating(a: float, b: float, c: float, z: float, terms: int | None = None) -> float:
    """Value of 2F1(a, b; c; z) when ``a`` or ``b`` is a non-positive integer.

    Raises
    ------
    NonTerminatingSeries
        If the series does not terminate and no ``terms`` truncation is given.
    """
    sign, log_abs = gauss_2f1_terminating_log(a, b, c, z, terms)
    return sign * math.exp(log_abs) if sign else 0.0


def _series_2f1(a, b, c, z, rel_stop):
    # non-terminating sum; the (1 - z) factor allows for the geometric tail
    total = term = mpmath.mpf(1)
    k = 0
    while True:
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        k += 1
        total += term
        if abs(term) < rel_stop * abs(total) * (1 - z):
            return total


def elementary_2f1_identity_gap(x: int, z: float) -> float:
    """``|F(x/2, (x+1)/2; x+1; z) - ((2 - 2 sqrt(1-z))/z)**x|`` for ``0 < z < 1``.

    Both sides are evaluated in 120-bit arithmetic so the reported gap
    reflects the identity rather than double rounding of an ``x``-th power.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z} outside (0, 1)")
    if x < 1:
        raise ParameterError("x must be a positive integer")
    with mpmath.workprec(120):
        zz = mpmath.mpf(z)
        lhs = _series_2f1(mpmath.mpf(x) / 2, mpmath.mpf(x + 1) / 2, mpmath.mpf(x + 1), zz, mpmath.mpf(1e-17))
        # 2 - 2 sqrt(1-z) over z, written without the cancellation
        rhs = (2 / (1 + mpmath.sqrt(1 - zz))) ** x
        return float(abs(lhs - rhs))


def gamma_expression_identity_gap(x: int, t: int, k: int) -> float:
    """Relative gap in the rewriting of ``1/(t-x-2k)!`` through gamma ratios.

    The right-hand side has gamma functions at negative arguments. Each ratio
    ``Gamma(m + k) / Gamma(m)`` with ``m <= 0`` is turned by the reflection
    formula into ``(-1)**k Gamma(1 - m) / Gamma(1 - m - k)``, which only needs
    log-gamma at positive arguments; the two ``(-1)**k`` factors are tracked
    as an explicit sign.
    """
    n = t - x - 2 * k
    if n < 0:
        raise DomainError(f"t - x - 2k = {n} is negative")
    if not (x >= 1 and t > x and k >= 0):
        raise DomainError("requires 1 <= x < t and k >= 0")
    lhs = 1.0 / math.factorial(n)
    m_int = (x - t) / 2            # (x-t)/2
    m_half = (x - t) / 2 + 0.5     # (x-t)/2 + 1/2
    sign = 1
    log_rhs = -math.lgamma(t + 1 - x) + 2 * k * math.log(2.0)
    # t > x makes both m <= 0, and 1 - m - k >= 1/2 for every admissible k
    for m in (m_half, m_int):
        sign *= -1 if k % 2 else 1
        log_rhs += math.lgamma(1 - m) - math.lgamma(1 - m - k)
    rhs = sign * math.exp(log_rhs)
    return abs(rhs - lhs) / lhs


def cos_power_fourier_coeffs(t: int) -> list[float]:
    """Coefficients of ``cos**(t-1)(pi*phi)`` in the basis ``cos((2k-t+1) pi phi)``.

    ``coeff[k] = C(t-1, k) / 2**(t-1)`` for ``k = 0 .. t-1``.
    """
    if t < 1:
        raise ParameterError("t must be >= 1")
    scale = 2.0 ** (t - 1)
    return [comb(t - 1, k) / scale for k in range(t)]
