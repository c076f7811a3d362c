import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from alphasun import storage_sim as ss
from alphasun.errors import DomainError


@given(st.floats(0.01, 0.99), st.integers(1, 30))
def test_nonpositive_inputs_from_zero_stay_zero(alpha, n):
    x = -np.abs(np.random.default_rng(n).standard_normal(n + 1))
    x[0] = 0.0
    law = ss.InputLaw("bounded-weibull", 1.0)
    path = ss.run_chain(law, alpha, n, None, inputs=x, path=True)
    assert np.all(path == 0.0)


@given(st.floats(0.01, 0.99), st.lists(st.floats(-5, 5), min_size=3, max_size=40))
def test_recurrence_and_monotonicity(alpha, xs):
    x = np.array(xs)
    law = ss.InputLaw("exponential-gumbel")
    path = ss.run_chain(law, alpha, len(x) - 1, None, inputs=x, path=True)
    assert np.all(np.diff(path) >= 0)
    for k in range(1, len(x)):
        assert path[k] == max(path[k - 1], alpha * path[k - 1] + x[k])


def test_input_laws(rng):
    p = ss.InputLaw("pareto-frechet", 2.0).sample(rng, 100_000)
    assert p.min() >= 1.0
    assert stats.kstest(p, lambda v: 1 - v**-2.0).statistic < 0.01
    w = ss.InputLaw("bounded-weibull", 0.5).sample(rng, 100_000)
    assert np.all((w <= 0) & (w >= -1))
    e = ss.InputLaw("exponential-gumbel").sample(rng, 100_000)
    assert abs(e.mean() - 1) < 0.02


def test_input_law_validation():
    with pytest.raises(DomainError):
        ss.InputLaw("cauchy", 1.0)
    with pytest.raises(DomainError):
        ss.InputLaw("pareto-frechet")


def test_ks_on_reference_sample(rng):
    # Kolmogorov bound: 1.63 / sqrt(1e4) ~ 0.016 at the 1% level
    x = rng.standard_normal(10_000)
    assert ss.ks_distance(x, stats.norm.cdf) <= 0.02
    assert ss.ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, stats.norm.cdf).statistic, abs=1e-12)


def test_ks_with_ties():
    assert ss.ks_distance(np.zeros(10), lambda v: np.full_like(v, 0.5)) == pytest.approx(0.5)


def test_fit_and_compare(rng):
    x = 3.0 * rng.exponential(size=20_000)
    f = ss.fit_and_compare(x, stats.expon.cdf, math.log(2), "scale")
    assert f.parameter == pytest.approx(3.0, rel=0.03) and f.ks < 0.02
    g = ss.fit_and_compare(x + 5, lambda v: stats.expon.cdf(v / 3), 3 * math.log(2), "location")
    assert g.parameter == pytest.approx(5.0, abs=0.1)
    with pytest.raises(DomainError):
        ss.fit_and_compare(-x, stats.expon.cdf, 1.0, "scale")


def test_renormalized_batch_meta(rng):
    b = ss.renormalized_batch(ss.InputLaw("exponential-gumbel"), 0.5, 100, 1000, rng, seed=7)
    assert b.meta["shift"] == pytest.approx(2 * math.log(100))
    with pytest.raises(DomainError):
        ss.renormalized_batch(ss.InputLaw("exponential-gumbel"), 0.5, 100, 10, rng)


def test_small_alpha_frechet_sanity(rng):
    law = ss.InputLaw("pareto-frechet", 1.5)
    b = ss.renormalized_batch(law, 1e-3, 2000, 10_000, rng)
    assert ss.ks_distance(b, lambda v: np.exp(-np.maximum(v, 1e-300) ** -1.5)) < 0.05


@pytest.mark.parametrize("tag", ss.LAWS)
def test_limit_laws_at_moderate_n(tag, rng):
    law = ss.InputLaw(tag, None if tag == "exponential-gumbel" else 1.0)
    cdf, med, kind, sign = ss.limit_reference(law, 0.5)
    b = ss.renormalized_batch(law, 0.5, 3000, 10_000, rng)
    assert ss.fit_and_compare(sign * b.values, cdf, med, kind).ks < 0.03
