"""Cross-method agreement checks over (x, t, params) grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import HopProbabilities
from .exact import PmfQuery, pmf, pmf_via_2f1
from .oracles import dp_grid, pmf_integral

ABS_TOL = 1e-10
REL_TOL = 1e-9
RECURSION_TOL = 1e-12
# relative comparisons are skipped below this magnitude
REL_FLOOR = 1e-280


def random_params(seed: int, count: int) -> list[HopProbabilities]:
    """``count`` strict triples drawn uniformly from the probability simplex."""
    rng = np.random.default_rng(seed)
    out = []
    for pr, pl, _ in rng.dirichlet((1.0, 1.0, 1.0), size=count):
        out.append(HopProbabilities.from_pair(float(pr), float(pl)))
    return out


@dataclass
class PairStat:
    """Largest discrepancy seen between two methods and where it happened."""

    name: str
    tol: float
    worst: float = 0.0
    where: tuple | None = None
    failures: list = field(default_factory=list)

    def add(self, gap: float, where: tuple) -> None:
        if gap > self.worst or math.isnan(gap):
            self.worst, self.where = gap, where
        if not gap <= self.tol:
            self.failures.append((where, gap))

    @property
    def ok(self) -> bool:
        return not self.failures


def crosscheck(
    x_max: int, t_max: int, params_list: list[HopProbabilities], *, integral: bool = True
) -> dict[str, PairStat]:
    """Compare the closed form with every other route on ``1 <= x <= x_max, x <= t <= t_max``."""
    stats = {
        "exact_vs_dp": PairStat("exact_vs_dp", ABS_TOL),
        "exact_vs_hyp": PairStat("exact_vs_hyp", REL_TOL),
        "recursion": PairStat("recursion", RECURSION_TOL),
    }
    if integral:
        stats["exact_vs_integral"] = PairStat("exact_vs_integral", ABS_TOL)
    for params in params_list:
        tag = params.as_tuple()
        grid = dp_grid(x_max + 1, t_max + 1, params).values
        exact = np.zeros((x_max + 2, t_max + 2))
        exact[0, 0] = 1.0
        for x in range(1, x_max + 2):
            for t in range(x, t_max + 2):
                exact[x, t] = pmf(PmfQuery(x, t, params)).value
        for x in range(1, x_max + 1):
            for t in range(x, t_max + 1):
                where = (x, t, tag)
                e = exact[x, t]
                stats["exact_vs_dp"].add(abs(e - grid[x, t]), where)
                if params.pp > 0:
                    h = pmf_via_2f1(PmfQuery(x, t, params)).value
                    if max(abs(e), abs(h)) > REL_FLOOR:
                        stats["exact_vs_hyp"].add(abs(h - e) / abs(e), where)
                if integral and params.pr > 0 and params.pl > 0:
                    g = pmf_integral(PmfQuery(x, t, params)).value
                    stats["exact_vs_integral"].add(abs(g - e), where)
                rhs = params.pr * exact[x + 1, t] + params.pl * exact[x - 1, t] + params.pp * e
                stats["recursion"].add(abs(exact[x, t + 1] - rhs), where)
    return stats
