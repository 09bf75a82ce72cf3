import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruinwalk.core import DivergentMoment, DomainError, HopProbabilities, ParameterError
from ruinwalk.exact import pmf_at
from ruinwalk.moments import (
    MomentCache,
    dp_moment,
    mean,
    mgf,
    moment_poly,
    s_max,
    second_moment,
    second_moment_linear_coeff,
    tail_moment_bound,
    third_moment,
    total_ruin_probability,
    variance,
)

P352 = HopProbabilities.from_pair(0.3, 0.5, 0.2)


def test_mgf_examples():
    assert mgf(0, -0.3, P352).value == 1.0
    assert mgf(3, 0.0, HopProbabilities.from_pair(0.4, 0.2, 0.4)).value == pytest.approx(0.125, rel=1e-14)
    assert mgf(2, 0.0, HopProbabilities.from_pair(0.2, 0.4)).value == pytest.approx(1.0, rel=1e-14)
    assert mgf(2, 0.0, HopProbabilities.from_pair(0.3, 0.3)).value == pytest.approx(1.0, rel=1e-7)


def test_mgf_matches_series():
    # E[exp(sT)] as a direct sum over the pmf
    s = 0.01
    ref = math.fsum(math.exp(s * t) * pmf_at(2, t, P352) for t in range(0, 6000))
    assert mgf(2, s, P352).value == pytest.approx(ref, rel=1e-12)


def test_mgf_pr_zero_path():
    p = HopProbabilities.from_pair(0.0, 0.6)
    s = 0.2
    ref = math.fsum(math.exp(s * t) * pmf_at(3, t, p) for t in range(0, 3000))
    assert mgf(3, s, p).value == pytest.approx(ref, rel=1e-12)
    assert s_max(p) == pytest.approx(-math.log(0.4))


def test_mgf_at_and_beyond_s_max():
    top = s_max(P352)
    assert math.isfinite(mgf(4, top, P352).value)
    assert mgf(4, top + 1e-15, P352).s == top
    with pytest.raises(DomainError):
        mgf(4, top + 1e-6, P352)


def test_total_ruin_examples():
    assert total_ruin_probability(5, HopProbabilities.from_pair(0.3, 0.3)) == 1.0
    assert total_ruin_probability(3, HopProbabilities.from_pair(0.4, 0.2)) == pytest.approx(0.125)
    assert total_ruin_probability(0, HopProbabilities.from_pair(0.9, 0.1)) == 1.0


def test_mean_examples():
    assert mean(5, P352) == pytest.approx(25.0, rel=1e-14)
    assert mean(0, P352) == 0.0
    with pytest.raises(DivergentMoment):
        mean(4, HopProbabilities.from_pair(0.4, 0.4))


def test_variance_example():
    assert variance(1, HopProbabilities.from_pair(0.4, 0.6)) == pytest.approx(120.0, rel=1e-12)
    assert second_moment(0, P352) == 0.0


def test_second_moment_forms_agree():
    for p in (P352, HopProbabilities.from_pair(0.1, 0.7), HopProbabilities.from_pair(0.0, 0.35)):
        d = p.pl - p.pr
        for x in (1, 4, 9):
            assert second_moment(x, p) == pytest.approx(x * x / d**2 + second_moment_linear_coeff(p) * x, rel=1e-13)


def test_third_moment_against_dp():
    ref, bound, _ = dp_moment(1, 3, P352, tol=1e-12)
    assert bound < 1e-9 * ref
    assert third_moment(1, P352) == pytest.approx(ref, rel=1e-6)


def test_third_moment_printed_x2_coefficient_is_off():
    """The x**2 coefficient ``3 (a/d**3 - 1/d)`` misses a factor 1/d; the dp sum rules it out."""
    p = P352
    d, a = p.pl - p.pr, p.pl + p.pr
    x = 4
    ref, _, _ = dp_moment(x, 3, p, tol=1e-12)
    c1 = (2 * a * a + 4 * p.pl * p.pr) / d**5 - 3 * a / d**3 + 1 / d
    printed = x**3 / d**3 + 3 * (a / d**3 - 1 / d) * x**2 + c1 * x
    assert abs(printed - ref) / ref > 1e-2
    assert third_moment(x, p) == pytest.approx(ref, rel=1e-9)


def test_moment_poly_low_orders():
    d = P352.pl - P352.pr
    assert moment_poly(1, P352).coefficients == pytest.approx((1 / d,))
    c1, c2 = moment_poly(2, P352).coefficients
    assert c2 == pytest.approx(1 / d**2, rel=1e-14)
    assert c1 == pytest.approx((P352.pl + P352.pr) / d**3 - 1 / d, rel=1e-14)


def test_moment_poly_matches_closed_forms():
    for p in (P352, HopProbabilities.from_pair(0.05, 0.9), HopProbabilities.from_pair(0.0, 0.2)):
        for x in range(0, 11):
            assert moment_poly(1, p)(x) == pytest.approx(mean(x, p), rel=1e-13, abs=1e-13)
            assert moment_poly(2, p)(x) == pytest.approx(second_moment(x, p), rel=1e-12, abs=1e-13)
            assert moment_poly(3, p)(x) == pytest.approx(third_moment(x, p), rel=1e-12, abs=1e-13)


def test_moment_poly_exact_rationals():
    exact = (Fraction(3, 10), Fraction(1, 2), Fraction(1, 5))
    poly = moment_poly(3, exact)
    assert poly.coefficients == (Fraction(5580), Fraction(1425), Fraction(125))
    assert poly(5) == 79150
    assert moment_poly(1, exact)(5) == 25
    with pytest.raises(ParameterError):
        moment_poly(2, (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))


def test_moment_poly_cache_reuse():
    cache = MomentCache()
    moment_poly(4, P352, cache)
    assert len(cache) == 4
    assert moment_poly(2, P352, cache) is moment_poly(2, P352, cache)


def test_moment_poly_needs_drift():
    with pytest.raises(DivergentMoment):
        moment_poly(2, HopProbabilities.from_pair(0.4, 0.3))
    with pytest.raises(ParameterError):
        moment_poly(0, P352)


@settings(max_examples=15, deadline=None)
@given(pr=st.floats(0.0, 0.4), gap=st.floats(0.1, 0.6), x=st.integers(1, 10), k=st.integers(1, 5))
def test_moment_poly_against_dp(pr, gap, x, k):
    pl = pr + gap
    if pl + pr > 1.0:
        pl = 1.0 - pr
        if pl - pr < 0.1:
            return
    p = HopProbabilities.from_pair(pr, pl)
    ref, bound, _ = dp_moment(x, k, p, tol=1e-10)
    assert bound <= 1e-8 * ref
    assert moment_poly(k, p)(x) == pytest.approx(ref, rel=1e-6)


def test_tail_bound_is_an_upper_bound():
    x, k, t_max = 2, 2, 200
    true_tail = math.fsum(t**k * pmf_at(x, t, P352) for t in range(t_max + 1, 4000))
    assert true_tail <= tail_moment_bound(x, k, t_max, P352)
    assert tail_moment_bound(x, k, 1, P352) == math.inf


def test_dp_moment_symmetric_diverges():
    with pytest.raises(DivergentMoment):
        dp_moment(1, 1, HopProbabilities.from_pair(0.3, 0.3))


def test_mgf_derivatives():
    h = 1e-4
    for x in (1, 5):
        m = lambda s: mgf(x, s, P352).value
        d1 = (m(h) - m(-h)) / (2 * h)
        d2 = (m(h) - 2 * m(0.0) + m(-h)) / h**2
        assert d1 == pytest.approx(mean(x, P352), rel=1e-5)
        assert d2 == pytest.approx(second_moment(x, P352), rel=1e-5)


def test_mgf_derivatives_richardson():
    from ruinwalk.moments import mgf_derivatives

    for p in (P352, HopProbabilities.from_pair(0.45, 0.55)):
        for x in (1, 10):
            d1, d2 = mgf_derivatives(x, p)
            assert d1 == pytest.approx(mean(x, p), rel=1e-8)
            assert d2 == pytest.approx(second_moment(x, p), rel=1e-8)
