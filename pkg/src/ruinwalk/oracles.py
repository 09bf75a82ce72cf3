"""Independent routes to the first-hitting probabilities.

* :func:`dp_grid` iterates the one-step recursion.
* :func:`trig_integral` / :func:`pmf_integral` use Gauss-Legendre quadrature
  on the trigonometric integral representation.

Monte Carlo lives in :mod:`ruinwalk.montecarlo`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from . import _backend
from .core import (
    CapacityError,
    DomainError,
    HopProbabilities,
    ParameterError,
    check_start,
    check_time,
)
from .exact import Method, PmfQuery, PmfValue

# float64 cells allowed in one dense grid (about 800 MB)
DEFAULT_CELL_BUDGET = 100_000_000


@dataclass(frozen=True)
class DpGrid:
    """``values[x, t]`` holds P(x, t) for ``0 <= x <= x_max``, ``0 <= t <= t_max``."""

    t_max: int
    x_max: int
    params: HopProbabilities
    values: np.ndarray = field(repr=False)

    def __getitem__(self, key):
        return self.values[key]

    def column_sums(self) -> np.ndarray:
        """Running totals ``sum_{s <= t} P(x, s)`` for every row."""
        return np.cumsum(self.values, axis=1)


def _check_dp_args(x_max: int, t_max: int, params: HopProbabilities) -> None:
    if not params.strict:
        raise ParameterError("dp_grid needs strict (normalised) probabilities")
    if check_start(x_max) < 1:
        raise ParameterError("x_max must be >= 1")
    check_time(t_max)


def dp_grid(
    x_max: int, t_max: int, params: HopProbabilities, *, cell_budget: int = DEFAULT_CELL_BUDGET
) -> DpGrid:
    """Fill P(x, t) column by column from P(0, 0) = 1.

    Raises
    ------
    CapacityError
        If the dense grid would exceed ``cell_budget`` cells.
    """
    _check_dp_args(x_max, t_max, params)
    cells = (x_max + 1) * (t_max + 1)
    if cells > cell_budget:
        raise CapacityError(f"grid of {cells} cells exceeds the budget of {cell_budget}")
    values = np.zeros((x_max + 1, t_max + 1))
    _backend.kernels.dp_run(x_max, t_max, params.pr, params.pl, params.pp, values)
    values.setflags(write=False)
    return DpGrid(t_max, x_max, params, values)


def band_width(x_max: int, params: HopProbabilities, escape: float) -> int | None:
    """Working height beyond which a walk from ``x <= x_max`` climbs with probability < ``escape``.

    Needs ``pl > pr``: the chance of ever climbing ``m`` levels is
    ``(pr/pl)**m``. Returns None when no finite band applies.
    """
    if not params.pl > params.pr:
        return None
    if params.pr == 0.0:
        return x_max + 1
    m = math.ceil(math.log(escape) / math.log(params.pr / params.pl))
    return x_max + max(m, 1)


def dp_grid_banded(x_max: int, t_max: int, params: HopProbabilities, *, escape: float = 1e-40):
    """Like :func:`dp_grid` with an absorbing wall above the start rows.

    Walks that would climb past the wall are dropped; the dropped mass is at
    most ``escape`` for every row. The cost is ``O(t_max * band)`` instead of
    ``O(t_max**2)``. Returns ``(grid, escape_bound)``; without downward drift
    the full grid is used and the bound is 0.
    """
    _check_dp_args(x_max, t_max, params)
    width = band_width(x_max, params, escape)
    if width is None or width >= max(x_max, t_max) + 1:
        return dp_grid(x_max, t_max, params), 0.0
    values = np.zeros((x_max + 1, t_max + 1))
    _backend.kernels.dp_run(x_max, t_max, params.pr, params.pl, params.pp, values, width)
    values.setflags(write=False)
    bound = (params.pr / params.pl) ** (width + 1 - x_max) if params.pr > 0 else 0.0
    return DpGrid(t_max, x_max, params, values), bound


def dp_column(x_max: int, t_max: int, params: HopProbabilities) -> np.ndarray:
    """P(x, t_max) for ``0 <= x <= x_max`` using two rolling columns."""
    _check_dp_args(x_max, t_max, params)
    return _backend.kernels.dp_run(x_max, t_max, params.pr, params.pl, params.pp, None)


def node_count(x: int, t: int) -> int:
    """Gauss-Legendre nodes for an integrand of trigonometric degree about ``t + x``.

    Rounded up to a multiple of 32 so that node sets are shared between calls.
    """
    return max(64, -(-(t + x + 16) // 32) * 32)


@lru_cache(maxsize=256)
def _unit_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(n)
    # map [-1, 1] -> [0, 1]
    return 0.5 * (nodes + 1.0), 0.5 * weights


def trig_integral(x: int, t: int, nodes: int | None = None) -> float:
    """Quadrature of ``int_0^1 cos**(t-1)(pi phi) sin(pi phi) sin(pi x phi) dphi``."""
    if x < 1 or t < 1:
        raise ParameterError("trig_integral needs x >= 1 and t >= 1")
    phi, w = _unit_nodes(nodes or node_count(x, t))
    theta = np.pi * phi
    f = np.cos(theta) ** (t - 1) * np.sin(theta) * np.sin(x * theta)
    return float(np.dot(w, f))


def trig_integral_closed(x: int, t: int) -> float:
    """Exact value of :func:`trig_integral`: ``x/2**t (t-1)! / (((t+x)/2)! ((t-x)/2)!)``.

    Zero for opposite parity and for ``t < x``.
    """
    if (t - x) % 2 or t < x:
        return 0.0
    return x * math.comb(t - 1, (t - x) // 2) / ((t + x) // 2) / 2.0**t


def pmf_integral(q: PmfQuery, *, nodes: int | None = None, shifted: bool = True) -> PmfValue:
    """P(x, t) from the integral representation, by Gauss-Legendre quadrature.

    The representation is ``2 pr**((1-x)/2) pl**((1+x)/2) * I`` with
    ``I = int_0^1 (pp + 2 sqrt(pr pl) cos(pi phi))**(t-1) sin(pi phi) sin(pi x phi) dphi``.
    For ``pr != pl`` the prefactor can reach ``(pl/pr)**(x/2)`` while ``I``
    comes from heavy cancellation, so rounding in ``I`` is amplified without
    bound. With ``shifted=True`` (default) the same integral is taken along the
    circle ``|w| = sqrt(pl/pr)`` in the variable ``w = exp(i pi phi)``; the
    integrand is a Laurent polynomial so the value is unchanged, and the
    prefactor folds into

        P = int_0^1 Re[(pp + pl e^{i pi phi} + pr e^{-i pi phi})**(t-1)
                       * (pl e^{-i (x-1) pi phi} - pr e^{-i (x+1) pi phi})] dphi

    whose integrand is bounded by 1. ``shifted=False`` evaluates the
    unit-circle form literally.

    Raises
    ------
    DomainError
        If ``pr`` or ``pl`` is zero.
    """
    x, t, p = q.x, q.t, q.params
    if p.pr == 0.0 or p.pl == 0.0:
        raise DomainError("integral representation needs pr > 0 and pl > 0")
    if x < 1 or t < 1:
        raise DomainError("integral representation needs x >= 1 and t >= 1")
    phi, w = _unit_nodes(nodes or node_count(x, t))
    theta = np.pi * phi
    if shifted:
        e = np.exp(1j * theta)
        base = p.pp + p.pl * e + p.pr * np.conj(e)
        tail = p.pl * np.exp(-1j * (x - 1) * theta) - p.pr * np.exp(-1j * (x + 1) * theta)
        value = float(np.dot(w, (base ** (t - 1) * tail).real))
    else:
        s = math.sqrt(p.pr * p.pl)
        f = (p.pp + 2.0 * s * np.cos(theta)) ** (t - 1) * np.sin(theta) * np.sin(x * theta)
        pref = 2.0 * p.pr ** ((1 - x) / 2) * p.pl ** ((1 + x) / 2)
        value = pref * float(np.dot(w, f))
    log_value = math.log(value) if value > 0 else -math.inf
    return PmfValue(value, Method.INTEGRAL, log_value)
