import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import tw1_cdf_painleve
from sompkit.errors import DomainError
from sompkit.tracywidom import (
    GaussianNormModel,
    centering_constants,
    chernoff_spectral_quantile,
    f1_cdf,
    f1_quantile,
    load_table,
    spectral_norm_cdf_tw,
    spectral_norm_quantile_tw,
    t_from_delta,
)

# F1 quantiles at 0.95 / 0.99 / 0.999 from the Painleve II oracle (tests/oracles.py), frozen
Q95, Q99, Q999 = 0.97931, 2.02344, 3.27243


def test_table_invariants():
    t = load_table()
    assert (np.diff(t.s_grid) > 0).all()
    assert (np.diff(t.f1_values) > 0).all()
    assert t.s_grid[0] <= -10 and t.s_grid[-1] >= 6
    assert ((t.f1_values > 0) & (t.f1_values < 1)).all()


def test_tails():
    assert f1_cdf(-10.0) <= 1e-6
    # the right tail is thin but not that thin: 1 - F1(6) is about 1.94e-6 (Painleve oracle)
    assert 1 - f1_cdf(6.0) == pytest.approx(1.9407e-6, rel=1e-3)
    assert f1_cdf(7.0) >= 1 - 1e-6
    assert f1_cdf(-50.0) == f1_cdf(-10.0)
    assert f1_cdf(50.0) < 1.0


@pytest.fixture(scope="module")
def oracle_grid():
    s = np.linspace(-5, 3, 161)
    return s, tw1_cdf_painleve(s)


def test_table_matches_painleve_oracle(oracle_grid):
    s, ref = oracle_grid
    assert np.abs(f1_cdf(s) - ref).max() <= 1e-4


def test_oracle_quantiles_frozen():
    ref = tw1_cdf_painleve([Q95, Q99, Q999])
    np.testing.assert_allclose(ref, [0.95, 0.99, 0.999], atol=2e-5)


def test_known_points():
    assert f1_cdf(0.9793) == pytest.approx(0.95, abs=1e-4)
    assert f1_cdf(2.02) == pytest.approx(0.99, abs=1e-4)
    assert f1_quantile(0.95) == pytest.approx(Q95, abs=1e-3)
    assert f1_quantile(0.99) == pytest.approx(Q99, abs=1e-3)
    assert f1_quantile(0.999) == pytest.approx(Q999, abs=1e-3)


def test_quantile_domain():
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            f1_quantile(p)


@settings(max_examples=200)
@given(st.floats(1e-6, 1 - 1e-6))
def test_quantile_round_trip(p):
    assert f1_cdf(f1_quantile(p)) == pytest.approx(p, abs=1e-6)


@given(st.floats(-12, 10), st.floats(-12, 10))
def test_cdf_monotone(a, b):
    lo, hi = sorted((a, b))
    assert f1_cdf(lo) <= f1_cdf(hi)


def test_centering_examples():
    assert centering_constants(1, 1)[0] == pytest.approx(2.0, rel=1e-15)
    mu, sg = centering_constants(100, 4)
    assert mu == pytest.approx(140.32, abs=0.01)
    assert sg == pytest.approx(10.18, abs=0.01)
    with pytest.raises(DomainError):
        centering_constants(0, 3)


def test_centering_symmetric():
    assert centering_constants(30, 7) == centering_constants(7, 30)


def test_spectral_norm_cdf_limits():
    m = GaussianNormModel(100, 4, 1.0)
    assert spectral_norm_cdf_tw(0.0, m) <= 1e-6
    assert spectral_norm_cdf_tw(1e3, m) >= 1 - 1e-6
    with pytest.raises(DomainError):
        spectral_norm_cdf_tw(-1.0, m)


def test_spectral_norm_quantile_example():
    m = GaussianNormModel(100, 4, 1.0)
    mu, sg = centering_constants(100, 4)
    assert spectral_norm_quantile_tw(0.999, m) == pytest.approx(math.sqrt(Q999 * sg + mu), rel=1e-4)
    assert spectral_norm_quantile_tw(0.999, GaussianNormModel(100, 4, 0.1)) == pytest.approx(
        0.1 * spectral_norm_quantile_tw(0.999, m), rel=1e-12)
    assert spectral_norm_cdf_tw(spectral_norm_quantile_tw(0.999, m), m) == pytest.approx(0.999, abs=1e-9)


def test_spectral_norm_quantile_radicand():
    with pytest.raises(DomainError):
        spectral_norm_quantile_tw(1e-6, GaussianNormModel(1, 1, 1.0))


def test_chernoff_examples():
    assert t_from_delta(1e-3) == pytest.approx(2.6283, abs=1e-4)
    assert chernoff_spectral_quantile(1e-3, 100, 4, 1.0) == pytest.approx(14.628, abs=1e-3)
    assert chernoff_spectral_quantile(1 - 1e-12, 100, 4, 1.0) == pytest.approx(12.0, abs=1e-5)
    with pytest.raises(DomainError):
        t_from_delta(1.0)


@pytest.mark.parametrize("delta", [1e-2, 1e-3])
def test_tw_quantile_below_chernoff(delta):
    tw = spectral_norm_quantile_tw(1 - delta, GaussianNormModel(100, 4, 1.0))
    assert tw <= chernoff_spectral_quantile(delta, 100, 4, 1.0)
