"""The compiled kernels and the numpy fallback must give the same answers."""
import math

import numpy as np
import pytest

from ruinwalk import _backend
from ruinwalk.core import log_factorial_table

pytestmark = pytest.mark.skipif(len(_backend.available()) < 2, reason="compiled kernels not built")


@pytest.fixture
def pair():
    return _backend.load("compiled"), _backend.load("python")


def test_names(pair):
    assert [k.NAME for k in pair] == ["compiled", "python"]


def test_default_prefers_compiled():
    assert _backend.available()[0] == "compiled"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.load("fortran")


@pytest.mark.parametrize("params", [(0.3, 0.5, 0.2), (0.0, 1.0, 0.0), (0.05, 0.05, 0.9), (0.6, 0.4, 0.0)])
def test_ruin_sum(pair, params):
    logs = [math.log(p) if p > 0 else -math.inf for p in params]
    lf = log_factorial_table(3000)
    for x, t in [(1, 1), (1, 3), (7, 31), (30, 200), (50, 3000)]:
        a, b = (k.ruin_sum(x, t, *logs, lf) for k in pair)
        assert a[0] == pytest.approx(b[0], rel=1e-13, abs=0)
        if math.isfinite(b[1]):
            assert a[1] == pytest.approx(b[1], abs=1e-12)
        else:
            assert a[1] == b[1]


def test_hyp_terminating(pair):
    for args in [(-4, 0.5, 2.0, 0.3, 4), (-40, -39.5, 51.0, 2.5, 40), (0, 1.0, 1.0, 0.5, 0), (-3, 2.0, 1.5, -7.0, 3)]:
        a, b = (k.hyp_terminating(*args) for k in pair)
        assert a[0] == b[0]
        assert a[1] == pytest.approx(b[1], abs=1e-12)


def test_dp_run(pair):
    grids = []
    for k in pair:
        g = np.zeros((25, 151))
        last = k.dp_run(24, 150, 0.27, 0.41, 0.32, g)
        grids.append((g, last))
    np.testing.assert_allclose(grids[0][0], grids[1][0], rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(grids[0][1], grids[1][1], rtol=1e-13, atol=1e-300)


def test_rng_bit_identical(pair):
    c, p = pair
    for seed in (0, 1, 2**63 + 5, 2**64 - 1):
        for i in (0, 1, 1000):
            key = c.stream_key(seed, i)
            assert key == p.stream_key(seed, i)
            assert [c.uniform(key, j) for j in range(20)] == [p.uniform(key, j) for j in range(20)]


def test_walks_identical(pair):
    c, p = pair
    for i in range(200):
        key = p.stream_key(42, i)
        assert c.walk_one(3, 0.3, 0.5, 500, key) == p.walk_one(3, 0.3, 0.5, 500, key)


def test_simulate_range(pair):
    out = []
    for k in pair:
        counts = np.zeros(1001, dtype=np.int64)
        censored = k.simulate_range(2, 0.35, 0.4, 1000, 77, 100, 30_000, counts)
        out.append((counts, censored))
    np.testing.assert_array_equal(out[0][0], out[1][0])
    assert out[0][1] == out[1][1]
