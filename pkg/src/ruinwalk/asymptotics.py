"""Long-time behaviour, the diffusion limit, and the series identities.

For ``pr != pl`` the hitting probability decays like ``decay_rate**t``
with ``decay_rate = pp + 2 sqrt(pr pl) < 1``; for ``pr == pl`` the geometric
factor is 1 and a ``t**-1.5`` power law remains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import DomainError, HopProbabilities, ParameterError, validate
from .exact import Method, PmfValue, log_pmf_via_2f1
from .moments import mgf


def decay_rate(params: HopProbabilities) -> float:
    """``pp + 2 sqrt(pr pl)``; at most 1, with equality iff ``pr == pl``."""
    return params.decay_rate


@dataclass(frozen=True)
class AsymptoticForm:
    prefactor: float
    decay_rate: float
    power: float = -1.5

    def log_value(self, t: int) -> float:
        return math.log(self.prefactor) + (t - 1) * math.log(self.decay_rate) + self.power * math.log(t)


def asymptotic_form(x: int, params: HopProbabilities) -> AsymptoticForm:
    """Large-t approximation ``prefactor * decay_rate**(t-1) * t**-1.5``."""
    pr, pl = params.pr, params.pl
    if pr * pl == 0.0:
        raise DomainError("asymptotic form needs pr > 0 and pl > 0")
    if x < 1:
        raise ParameterError("asymptotic form needs x >= 1")
    lam = params.decay_rate
    g = math.sqrt(pr * pl)
    log_pref = (
        math.log(x / (2.0 * math.sqrt(math.pi)))
        + 0.5 * (1 - x) * math.log(pr)
        + 0.5 * (1 + x) * math.log(pl)
        + 1.5 * math.log(lam / g)
    )
    return AsymptoticForm(math.exp(log_pref), lam)


def asymptotic_pmf(x: int, t: int, params: HopProbabilities) -> PmfValue:
    """Evaluate the large-t approximation of P(x, t) in log space."""
    if t < 1:
        raise ParameterError("asymptotic form needs t >= 1")
    form = asymptotic_form(x, params)
    return PmfValue.from_log(form.log_value(t), Method.ASYMPTOTIC)


def power_law_pmf(x: int, t: int, p: float) -> float:
    """Symmetric case ``pr == pl == p``: ``x / (2 sqrt(pi p)) * t**-1.5``."""
    if p <= 0.0:
        raise DomainError("power law needs p > 0")
    if t < 1:
        raise ParameterError("power law needs t >= 1")
    return x / (2.0 * math.sqrt(math.pi * p)) * t**-1.5


def tail_slope(t, log_p, *, loglog: bool = False) -> float:
    """Ordinary least-squares slope of ``log_p`` against ``t`` (or ``log t``)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(log_p, dtype=float)
    u = np.log(t) if loglog else t
    return float(np.polyfit(u, y, 1)[0])


@dataclass(frozen=True)
class ContinuumParams:
    """Drift ``v`` (positive means away from the origin), diffusion ``D``, halting ``pp``."""

    v: float
    D: float
    pp: float = 0.0

    def __post_init__(self):
        if not self.D > 0:
            raise ParameterError(f"diffusion coefficient must be positive, got {self.D}")
        if not 0.0 <= self.pp < 1.0:
            raise ParameterError(f"halting probability must lie in [0, 1), got {self.pp}")

    @classmethod
    def from_lattice(cls, params: HopProbabilities, step: float, dt: float) -> "ContinuumParams":
        """Scale a lattice walk with spacing ``step`` and time step ``dt``."""
        return cls((params.pr - params.pl) * step / dt, step * step / (2.0 * dt), params.pp)

    @property
    def effective_diffusion(self) -> float:
        return (1.0 - self.pp) * self.D


def _log_density_at(xi: float, log_tau: float, cp: ContinuumParams) -> float:
    d_eff = cp.effective_diffusion
    tau = math.exp(log_tau)
    # (xi + v tau)**2 / tau expanded so tau -> 0 and tau -> inf stay finite
    quad = xi * xi / tau + 2.0 * xi * cp.v + cp.v * cp.v * tau
    return math.log(xi) - 0.5 * math.log(4.0 * math.pi * d_eff) - 1.5 * log_tau - quad / (4.0 * d_eff)


def inverse_gaussian_density(xi: float, tau: float, cp: ContinuumParams) -> float:
    """First-passage density to the origin of drifted diffusion started at ``xi``.

    ``xi / sqrt(4 pi D' tau**3) * exp(-(xi + v tau)**2 / (4 D' tau))`` with
    ``D' = (1 - pp) D``.
    """
    if xi <= 0.0 or tau <= 0.0:
        raise DomainError("density needs xi > 0 and tau > 0")
    d_eff = (1.0 - cp.pp) * cp.D
    expo = -((xi + cp.v * tau) ** 2) / (4.0 * d_eff * tau)
    return xi / math.sqrt(4.0 * math.pi * d_eff * tau**3) * math.exp(expo)


def inverse_gaussian_mass(xi: float, cp: ContinuumParams) -> float:
    """``int_0^inf density dtau``, integrated over ``log tau``.

    In that variable both tails decay exponentially, including the
    ``tau**-1.5`` tail of the driftless case.
    """
    if xi <= 0.0:
        raise DomainError("mass needs xi > 0")

    def f(u):
        # both tails are below exp(-300) long before |log tau| = 700
        if abs(u) > 700.0:
            return 0.0
        return math.exp(_log_density_at(xi, u, cp) + u)

    # breakpoints at the diffusive time scale and, with drift, at xi/|v|,
    # where a sharply peaked density would otherwise be missed
    centre = math.log(xi * xi / cp.effective_diffusion)
    marks = [centre - 15.0, centre, centre + 25.0]
    if cp.v != 0.0:
        peak = math.log(xi / abs(cp.v))
        marks += [peak - 1.0, peak - 0.1, peak, peak + 0.1, peak + 1.0]
    marks = sorted(marks)
    edges = [-math.inf, marks[0] - 5.0, *marks, marks[-1] + 5.0, math.inf]
    return math.fsum(
        integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        for a, b in zip(edges[:-1], edges[1:])
    )


def series_identity_gap(x: int, z: float, t_trunc: int, s: float = -math.log(2.0)) -> float:
    """``|sum_{t <= t_trunc} e^{s t} P~(x, t) - M~_x(s)|`` at formal parameters.

    ``P~`` and ``M~`` are the hypergeometric hitting probability and the
    closed-form generating function evaluated at ``pr = z/4, pl = pp = 1``
    (not a probability triple). At the default ``s = -log 2`` the right-hand
    side reduces to ``((2 - 2 sqrt(1 - z)) / z)**x``.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z={z} outside (0, 1)")
    if x < 1 or t_trunc < x:
        raise ParameterError("need x >= 1 and t_trunc >= x")
    params = validate(z / 4.0, 1.0, 1.0, strict=False)
    if s >= -math.log(params.decay_rate):
        raise DomainError(f"series diverges for s={s}")
    terms = [
        math.exp(s * t + log_pmf_via_2f1(x, t, params.pr, params.pl, params.pp))
        for t in range(x, t_trunc + 1)
    ]
    rhs = mgf(x, s, params).value
    return abs(math.fsum(terms) - rhs)
