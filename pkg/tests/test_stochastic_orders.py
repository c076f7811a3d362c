import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special, stats

from alphasun import stochastic_orders as so
from alphasun.errors import DomainError, PreconditionError

pos = st.floats(0.2, 5.0)


def test_beta_crossing_oracles():
    assert so.beta_crossing_count(1, 1, 1, 2) == 2
    assert so.beta_crossing_count(2, 3, 0.5, 4) == 2
    assert so.beta_crossing_count(2, 3, 1.5, 1.5) == 0
    with pytest.raises(DomainError):
        so.beta_crossing_count(1, 1, 2, 1)
    with pytest.raises(DomainError):
        so.beta_crossing_count(1, 1, 1, 2, grid=100)


@given(pos, pos, pos, pos)
def test_beta_crossings_always_two(a, b, s, t):
    s, t = sorted((s, t))
    if t / s < 1.01:
        return
    assert so.beta_crossing_count(a, b, s, t) == 2


@given(pos, pos, st.floats(-0.5, 1.5))
def test_beta_call_matches_quadrature(a, b, c):
    want = integrate.quad(lambda x: max(x - c, 0.0) * stats.beta.pdf(x, a, b), 0, 1, limit=200,
                          points=[min(max(c, 0), 1)])[0]
    assert float(so.beta_call(a, b, c)) == pytest.approx(want, abs=1e-8)


def test_t_alpha_single_crossing():
    for c1, c2, delta in ((0.5, 0.5, 2.0), (0.2, 0.9, 1.5), (0.9, 0.1, 4.0)):
        assert so.t_alpha_crossings(c1, c2, delta) == 1


def test_ltilde_params_and_moments():
    assert so.ltilde_params(1.0, 0.0) == (0.5, 1.0)
    assert so.ltilde_moment(1.0, 0.0, 1) == 1.0
    with pytest.raises(DomainError):
        so.ltilde_params(2.0, 0.0)
    with pytest.raises(DomainError):
        so.ltilde_params(1.0, 0.5)


def test_d_to_two_gamma_limit():
    d = 2 * (1 - 1e-3)
    for n in range(1, 5):
        assert so.ltilde_moment(d, 0.0, n) == pytest.approx(so.gamma_limit_moment(0.0, n), rel=0.01)


def test_limit_targets():
    # alpha^alpha / Gamma(1+alpha) at alpha = 1/2
    assert so.bernoulli_limit_moment(0.5, 2) == pytest.approx(1 / 0.7978845608028654, rel=1e-12)
    # Gamma(1) moments: n!
    assert so.gamma_limit_moment(0.0, 3) == pytest.approx(6.0)


def test_ltilde_sampler_moments(rng):
    b = so.sample_ltilde(1.0, 0.0, rng, 200_000)
    m1, s1 = b.moment(1)
    m2, s2 = b.moment(2)
    assert abs(m1 - 1) < 4 * s1
    assert abs(m2 - so.ltilde_moment(1.0, 0.0, 2)) < 4 * s2


def test_beta_peacock():
    ts = [0.5, 1, 2, 4]
    r = so.convex_order_check(so.beta_family(2, 3, ts), ts, "decreasing")
    assert r.monotone and r.max_violation < 1e-12
    # wrong direction is detected
    assert not so.convex_order_check(so.beta_family(2, 3, ts), ts, "increasing").monotone


def test_convex_order_preconditions():
    with pytest.raises(PreconditionError):
        so.convex_order_check([so.BetaMember(1, 1), so.BetaMember(1, 2)], [0, 1])
    with pytest.raises(DomainError):
        so.convex_order_check([so.BetaMember(1, 1)], [0])


def test_ltilde_peacocks(rng):
    ps = [-4, -1, 0, 0.4]
    assert so.convex_order_check(so.ltilde_family([1.0] * 4, ps, rng, 50_000), ps).monotone
    ds = [0.4, 1.0, 1.6]
    assert so.convex_order_check(so.ltilde_family(ds, [0.0] * 3, rng, 50_000), ds).monotone


def test_mittag_leffler_monotone():
    v = so.ml_monotonicity(np.linspace(-5, 5, 21), np.arange(1, 10) / 10)
    assert v.ok
    assert np.allclose(so.ml_monotonicity([0.0], [0.2, 0.5]).values, 0.0)
    with pytest.raises(DomainError):
        so.ml_monotonicity([6.0], [0.5])


@given(pos, pos)
def test_prefactor_strictly_decreasing(a, b):
    assert so.prefactor_monotone(a, b, np.linspace(0.05, 0.95, 19)).ok


def test_prefactor_limit():
    assert math.exp(so.log_prefactor(1.0, 1.0, 1e-12)) == pytest.approx(1.0, abs=1e-10)
