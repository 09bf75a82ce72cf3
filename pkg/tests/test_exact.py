import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_helpers import enumerate_paths, rational_dp
from ruinwalk.core import DomainError, HopProbabilities, ParameterError
from ruinwalk.exact import (
    Method,
    PmfQuery,
    classic_pmf,
    log_pmf_via_2f1,
    pmf,
    pmf_at,
    pmf_via_2f1,
)

P352 = HopProbabilities.from_pair(0.3, 0.5, 0.2)
EXACT352 = (Fraction(3, 10), Fraction(1, 2), Fraction(1, 5))


def simplex_triples():
    return st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)).filter(lambda v: v[0] + v[1] <= 1.0).map(
        lambda v: HopProbabilities.from_pair(*v)
    )


def test_classic_examples():
    assert classic_pmf(1, 1, 0.4, 0.6).value == pytest.approx(0.6, rel=1e-15)
    assert classic_pmf(1, 2, 0.4, 0.6).value == 0.0
    assert classic_pmf(2, 4, 0.5, 0.5).value == pytest.approx(0.125, rel=1e-15)


def test_classic_boundaries():
    assert classic_pmf(0, 0, 0.5, 0.5).value == 1.0
    assert classic_pmf(0, 3, 0.5, 0.5).value == 0.0
    assert classic_pmf(5, 3, 0.5, 0.5).value == 0.0


def test_classic_needs_no_halting():
    with pytest.raises(ParameterError):
        classic_pmf(1, 1, 0.3, 0.5)


def test_pmf_examples():
    assert pmf(PmfQuery(2, 1, P352)).value == 0.0
    assert pmf(PmfQuery(1, 2, P352)).value == pytest.approx(0.10, rel=1e-14)
    assert pmf(PmfQuery(1, 3, P352)).value == pytest.approx(0.095, rel=1e-14)


def test_pmf_boundaries():
    assert pmf(PmfQuery(0, 0, P352)).value == 1.0
    assert pmf(PmfQuery(0, 7, P352)).value == 0.0
    assert pmf(PmfQuery(0, 7, P352)).method is Method.CLOSED_FORM


@pytest.mark.parametrize("x,t", [(1, 1), (1, 5), (2, 6), (3, 7), (4, 8)])
def test_pmf_against_path_enumeration(x, t, backend):
    ref = enumerate_paths(x, t, *EXACT352)
    assert pmf(PmfQuery(x, t, P352)).value == pytest.approx(float(ref), rel=1e-13)


def test_pmf_against_rational_recursion(backend):
    table = rational_dp(12, 60, *EXACT352)
    for x in range(1, 13):
        for t in range(61):
            ref = float(table[x][t])
            got = pmf_at(x, t, P352)
            assert got == pytest.approx(ref, rel=1e-12, abs=1e-300), (x, t)


@pytest.mark.parametrize("pr", [0.0, 0.2, 0.5, 0.9, 1.0])
def test_pmf_no_halting_equals_classic(pr, backend):
    params = HopProbabilities.from_pair(pr, 1.0 - pr)
    for x in range(1, 6):
        for t in range(0, 40):
            a = pmf(PmfQuery(x, t, params)).value
            b = classic_pmf(x, t, pr, 1.0 - pr).value
            assert a == pytest.approx(b, rel=1e-13, abs=0), (x, t)


def test_pmf_zero_hops():
    only_left = HopProbabilities.from_pair(0.0, 1.0)
    assert pmf_at(7, 7, only_left) == 1.0
    assert pmf_at(7, 8, only_left) == 0.0
    only_halt = HopProbabilities.from_pair(0.0, 0.0)
    assert pmf_at(1, 1, only_halt) == 0.0


def test_pmf_large_t_no_underflow_in_log():
    params = HopProbabilities.from_pair(0.1, 0.4)
    v = pmf(PmfQuery(1, 20_000, params))
    assert v.value == 0.0 or v.value > 0
    assert math.isfinite(v.log_value)
    assert v.log_value < -900


@settings(max_examples=40, deadline=None)
@given(params=simplex_triples(), x=st.integers(1, 8))
def test_pmf_mass_bounded(params, x):
    total = math.fsum(pmf_at(x, t, params) for t in range(0, 120))
    assert total <= 1.0 + 1e-12


def test_2f1_examples():
    assert pmf_via_2f1(PmfQuery(1, 1, P352)).value == pytest.approx(0.5, rel=1e-15)
    assert pmf_via_2f1(PmfQuery(1, 3, P352)).value == pytest.approx(0.095, rel=1e-14)
    assert pmf_via_2f1(PmfQuery(50, 49, P352)).value == 0.0


def test_2f1_domain():
    with pytest.raises(DomainError):
        pmf_via_2f1(PmfQuery(1, 3, HopProbabilities.from_pair(0.4, 0.6)))
    with pytest.raises(DomainError):
        pmf_via_2f1(PmfQuery(0, 3, P352))


@settings(max_examples=50, deadline=None)
@given(params=simplex_triples().filter(lambda p: p.pp > 1e-3), x=st.integers(1, 30), extra=st.integers(0, 170))
def test_2f1_matches_sum(params, x, extra):
    t = x + extra
    a = pmf(PmfQuery(x, t, params))
    b = pmf_via_2f1(PmfQuery(x, t, params))
    if a.value == 0.0:
        assert b.value == 0.0 or b.value < 1e-300
    else:
        assert b.log_value == pytest.approx(a.log_value, abs=1e-9)


def test_log_2f1_formal_params():
    # any non-negative pr, pl and positive pp; compare with the explicit sum
    pr, pl, pp = 0.05, 1.0, 1.0
    for x, t in [(1, 1), (2, 5), (3, 9)]:
        ref = sum(
            pr**k * pl ** (x + k) * pp ** (t - x - 2 * k) * x * math.factorial(t - 1)
            / (math.factorial(x + k) * math.factorial(k) * math.factorial(t - x - 2 * k))
            for k in range((t - x) // 2 + 1)
        )
        assert math.exp(log_pmf_via_2f1(x, t, pr, pl, pp)) == pytest.approx(ref, rel=1e-13)


def test_query_validation():
    with pytest.raises(ParameterError):
        PmfQuery(-1, 3, P352)
    with pytest.raises(ParameterError):
        PmfQuery(1, 2.5, P352)
