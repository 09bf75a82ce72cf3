"""Generating function, moments and total ruin probability of the hitting time."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence, Union

import numpy as np

from .core import DivergentMoment, DomainError, HopProbabilities, ParameterError, check_start
from .oracles import dp_grid_banded

# s this far above s_max is treated as rounding noise
S_MAX_CLAMP = 1e-14
POLY_RESIDUAL_TOL = 1e-10

ExactTriple = tuple[Fraction, Fraction, Fraction]
Params = Union[HopProbabilities, ExactTriple]


@dataclass(frozen=True)
class MgfValue:
    value: float
    s: float
    s_max: float


def s_max(params: HopProbabilities) -> float:
    """Upper end of the generating function's domain, ``-log(pp + 2 sqrt(pr pl))``."""
    lam = params.decay_rate
    return math.inf if lam == 0.0 else -math.log(lam)


def mgf(x: int, s: float, params: HopProbabilities) -> MgfValue:
    """``E[exp(s T_x)]`` in closed form.

    ``(u - sqrt(u**2 - pl/pr))**x`` with ``u = (exp(-s) - pp) / (2 pr)``,
    evaluated in a rationalised form free of cancellation and overflow. For
    ``pr == 0`` the limit ``(pl / (exp(-s) - pp))**x`` is used instead.

    Raises
    ------
    DomainError
        For ``s > s_max``.
    """
    x = check_start(x)
    pr, pl, pp = params.as_tuple()
    top = s_max(params)
    if s > top:
        if s - top > S_MAX_CLAMP:
            raise DomainError(f"s={s} exceeds s_max={top}")
        s = top
    if x == 0:
        return MgfValue(1.0, s, top)
    gap = math.exp(-s) - pp
    if pr == 0.0:
        if gap <= 0.0:
            raise DomainError(f"generating function diverges at s={s}")
        return MgfValue((pl / gap) ** x, s, top)
    if params.pl == 0.0:
        return MgfValue(0.0, s, top)
    # u - sqrt(u**2 - pl/pr) with u = gap / (2 pr), rationalised and divided
    # through by u so that neither a tiny pr nor u**2 overflows
    disc = max(1.0 - 4.0 * pr * pl / (gap * gap), 0.0)
    base = 2.0 * pl / (gap * (1.0 + math.sqrt(disc)))
    return MgfValue(base**x, s, top)


def mgf_derivatives(x: int, params: HopProbabilities, *, levels: int = 5) -> tuple[float, float]:
    """First and second derivatives of :func:`mgf` at ``s = 0`` by finite differences.

    Central differences with steps ``h0 / 2**j`` (``h0 = s_max / 4``, at most
    0.05) are combined by Richardson extrapolation, which removes the
    ``h**2, h**4, ...`` error terms. Only ``|s| <= h0`` is evaluated, so the
    stencil stays inside the domain.
    """
    top = s_max(params)
    if not top > 0:
        raise DivergentMoment("generating function has no derivative at 0 when pl == pr")
    h0 = min(top / 4.0, 0.05)
    m0 = mgf(x, 0.0, params).value
    d1_row, d2_row = [], []
    for j in range(levels):
        h = h0 / 2**j
        up, down = mgf(x, h, params).value, mgf(x, -h, params).value
        d1_row.append((up - down) / (2.0 * h))
        d2_row.append((up - 2.0 * m0 + down) / (h * h))
    for row in (d1_row, d2_row):
        for level in range(1, levels):
            factor = 4.0**level
            for j in range(levels - 1, level - 1, -1):
                row[j] = (factor * row[j] - row[j - 1]) / (factor - 1.0)
    return d1_row[-1], d2_row[-1]


def total_ruin_probability(x: int, params: HopProbabilities) -> float:
    """Probability that the walk ever reaches 0: 1 if ``pl >= pr`` else ``(pl/pr)**x``."""
    x = check_start(x)
    if x == 0 or params.pl >= params.pr:
        return 1.0
    return (params.pl / params.pr) ** x


def _drift(params: HopProbabilities) -> float:
    d = params.pl - params.pr
    if d <= 0:
        raise DivergentMoment(f"moments need pl > pr (pl - pr = {d})")
    return d


def mean(x: int, params: HopProbabilities) -> float:
    return check_start(x) / _drift(params)


def second_moment(x: int, params: HopProbabilities) -> float:
    x = check_start(x)
    d = _drift(params)
    pp = params.pp
    return x * x / d**2 + (pp * (1.0 - pp) + 4.0 * params.pr * params.pl) / d**3 * x


def second_moment_linear_coeff(params: HopProbabilities) -> float:
    """Coefficient of ``x`` in the second moment, written as ``(pl+pr)/d**3 - 1/d``."""
    d = _drift(params)
    return (params.pl + params.pr) / d**3 - 1.0 / d


def third_moment(x: int, params: HopProbabilities) -> float:
    """Closed-form third moment.

    The ``x**2`` coefficient is ``3 ((pl+pr)/d**4 - 1/d**2)`` with
    ``d = pl - pr``, i.e. three times the variance coefficient divided by
    ``d``; the recursion and exact rational solves both give this.
    """
    x = check_start(x)
    d = _drift(params)
    a = params.pl + params.pr
    c2 = 3.0 * (a / d**4 - 1.0 / d**2)
    c1 = (2.0 * a * a + 4.0 * params.pl * params.pr) / d**5 - 3.0 * a / d**3 + 1.0 / d
    return x**3 / d**3 + c2 * x**2 + c1 * x


def variance(x: int, params: HopProbabilities) -> float:
    x = check_start(x)
    return second_moment_linear_coeff(params) * x


@dataclass(frozen=True)
class MomentPolynomial:
    """``E[T_x**k] = sum_i coefficients[i-1] * x**i`` for ``i = 1..k``."""

    order: int
    coefficients: tuple

    def __call__(self, x):
        total = 0 * self.coefficients[0]
        for c in reversed(self.coefficients):
            total = (total + c) * x
        return total

    def padded(self) -> list:
        """Coefficients by power, including the zero constant term."""
        return [0 * self.coefficients[0], *self.coefficients]


class MomentCache:
    """Caller-owned memo of moment polynomials, keyed by parameters."""

    def __init__(self):
        self._store: dict[tuple, list[MomentPolynomial]] = {}

    def get(self, key: tuple) -> list[MomentPolynomial]:
        return self._store.setdefault(key, [])

    def __len__(self) -> int:
        return sum(len(v) for v in self._store.values())


def _split(params: Params):
    if isinstance(params, HopProbabilities):
        return params.pr, params.pl, False
    pr, pl, pp = (Fraction(v) for v in params)
    if min(pr, pl, pp) < 0 or pr + pl + pp != 1:
        raise ParameterError("exact parameters must be non-negative and sum to 1")
    return pr, pl, True


def _step_coeff(i: int, n: int, pr, pl):
    # coefficient of x**n in pr (x+1)**i + pl (x-1)**i - (pr+pl) x**i, for n < i
    return comb(i, n) * (pr + pl * (-1) ** (i - n))


def moment_poly(k: int, params: Params, cache: MomentCache | None = None) -> MomentPolynomial:
    """k-th moment of the hitting time as a polynomial in the start position.

    Built upwards from ``E[T**0] = 1``. Order ``k`` satisfies

        pr m(x+1) - (pr+pl) m(x) + pl m(x-1) = sum_{j<k} C(k,j) (-1)**(k-j) E[T_x**j],

    which follows from expanding ``t**k`` in powers of ``t + 1``. A polynomial
    with no constant term solves it by back substitution on a triangular
    system; leaving out the constant and ``(pl/pr)**x`` homogeneous parts
    matches ``E[T_0**k] = 0`` and finiteness as ``pr -> 0``.

    Parameters given as a tuple of :class:`~fractions.Fraction` are solved
    exactly; floats are checked for a residual below 1e-10.
    """
    if k < 1:
        raise ParameterError("moment order must be >= 1")
    pr, pl, exact = _split(params)
    if pl - pr <= 0:
        raise DivergentMoment(f"moments need pl > pr (pl - pr = {pl - pr})")
    one = Fraction(1) if exact else 1.0
    known = (cache if cache is not None else MomentCache()).get((pr, pl, exact))
    while len(known) < k:
        order = len(known) + 1
        lower = [[one]] + [poly.padded() for poly in known]
        h = [0 * one] * order
        for j, coeffs in enumerate(lower):
            w = comb(order, j) * (-1) ** (order - j)
            for n, c in enumerate(coeffs):
                h[n] += w * c
        sol = [0 * one] * (order + 1)
        for n in range(order - 1, -1, -1):
            acc = h[n] - sum(sol[i] * _step_coeff(i, n, pr, pl) for i in range(n + 2, order + 1))
            sol[n + 1] = acc / ((n + 1) * (pr - pl))
        if not exact:
            _check_residual(sol, h, pr, pl)
        known.append(MomentPolynomial(order, tuple(sol[1:])))
    return known[k - 1]


def _check_residual(sol: Sequence[float], h: Sequence[float], pr: float, pl: float) -> None:
    order = len(sol) - 1
    for n in range(order):
        terms = [sol[i] * _step_coeff(i, n, pr, pl) for i in range(n + 1, order + 1)]
        scale = max(1.0, abs(h[n]), *(abs(v) for v in terms))
        if abs(math.fsum(terms) - h[n]) > POLY_RESIDUAL_TOL * scale:
            raise ArithmeticError(f"moment polynomial residual too large at power {n}")


def tail_moment_bound(x: int, k: int, t_max: int, params: HopProbabilities) -> float:
    """Upper bound on ``sum_{t > t_max} t**k P(x, t)``.

    Uses ``P(x, t) <= exp(-s t) E[exp(s T_x)]`` at ``s = s_max / 2`` and a
    geometric bound on ``t**k exp(-s t)`` once ``t >= 2k / s``. Returns inf
    when ``t_max`` is too small for the bound to apply.
    """
    top = s_max(params)
    if not top > 0:
        return math.inf
    s = min(top / 2.0, 1.0)
    start = t_max + 1
    if start < 2 * k / s:
        return math.inf
    m = mgf(x, s, params).value
    ratio = math.exp(k / start - s)
    return m * start**k * math.exp(-s * start) / (1.0 - ratio)


def dp_moment(x: int, k: int, params: HopProbabilities, *, tol: float = 1e-9, t_max: int | None = None):
    """``sum_t t**k P(x, t)`` from the recursion, with a rigorous error bound.

    ``t_max`` is grown until :func:`tail_moment_bound` is below ``tol`` times
    a rough size of the moment. The recursion runs in a band (see
    :func:`~ruinwalk.oracles.dp_grid_banded`); by Cauchy-Schwarz the walks it
    drops change the sum by at most ``sqrt(q E[T**(2k)])`` with ``q`` the
    dropped mass, and ``E[T**(2k)] <= (2k)! M(s) / s**(2k)``. Returns
    ``(value, bound, t_max)`` where ``bound`` covers both the tail and the band.
    """
    x = check_start(x)
    if not s_max(params) > 0:
        raise DivergentMoment("tail of P(x, t) is not geometric when pl == pr")
    if t_max is None:
        t_max = max(64, 4 * x)
        while True:
            bound = tail_moment_bound(x, k, t_max, params)
            guess = max(x / max(params.pl - params.pr, 1e-3), 1.0) ** k
            if bound < tol * guess:
                break
            t_max *= 2
    grid, dropped = dp_grid_banded(max(x, 1), t_max, params)
    t = np.arange(t_max + 1, dtype=float)
    value = math.fsum((t**k * grid.values[x]).tolist())
    bound = tail_moment_bound(x, k, t_max, params)
    if dropped > 0.0:
        s = min(s_max(params) / 2.0, 1.0)
        high = math.factorial(2 * k) * mgf(x, s, params).value / s ** (2 * k)
        bound += math.sqrt(dropped * high)
    return value, bound, t_max
