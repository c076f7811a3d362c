import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from alphasun import sun_frechet as fr
from alphasun.errors import DomainError
from alphasun.params import DistParams

params = st.builds(DistParams, st.floats(0.05, 0.9), st.floats(0.3, 3.0))


def F_quad(p, lam):
    """Frozen-independent oracle: F(lam) = lam int_0^1 x^(lam-1) (1 - alpha x^(1/gamma))^(-gamma) dx."""
    f = lambda x: lam * x ** (lam - 1) * (1 - p.alpha * x ** (1 / p.gamma)) ** (-p.gamma)
    return integrate.quad(f, 0, 1, epsrel=1e-13, limit=200)[0]


def test_F_oracles(p51):
    assert fr.laplace_exponent_F(DistParams(1e-9, 1.0), 3.0) == pytest.approx(1.0, abs=1e-7)
    assert fr.laplace_exponent_F(p51, 1.0) == pytest.approx(2 * math.log(2), rel=1e-14)
    assert fr.laplace_exponent_F(p51, 1e4) == pytest.approx(2.0, abs=1e-3)


@given(params, st.floats(0.5, 30))
def test_F_matches_quadrature(p, lam):
    assert fr.laplace_exponent_F(p, lam) == pytest.approx(F_quad(p, lam), rel=1e-9)


@given(params)
def test_F_increasing_to_limit(p):
    v = fr.F_values(p, np.arange(1, 60))
    assert np.all(np.diff(v) > 0)
    assert v[-1] < (1 - p.alpha) ** (-p.gamma)


def test_jump_tail_oracles(p51):
    assert fr.levy_jump_tail(p51, 0.0) == pytest.approx(1.0, rel=1e-14)
    assert fr.levy_jump_tail(p51, 80.0) < 1e-30
    assert fr.levy_jump_tail(p51, math.log(2)) == pytest.approx(1 / 3, rel=1e-14)
    assert fr.sample_jump(p51, 0.5) == pytest.approx(-math.log(2 / 3), rel=1e-12)


@given(params, st.floats(1e-6, 0.999))
def test_sample_jump_inverts_tail(p, u):
    t = fr.sample_jump(p, u)
    assert fr.levy_jump_tail(p, t) / fr.total_jump_rate(p) == pytest.approx(1 - u, rel=1e-9)


def test_moment_oracles(p51):
    assert fr.moment_Y(p51, 1) == pytest.approx(0.7213475204444817, rel=1e-13)
    assert fr.moment_Y(p51, 0) == 1.0
    assert fr.moment_Y(DistParams(1e-9, 2.0), 5) == pytest.approx(120.0, rel=1e-6)


@given(params)
def test_moments_bounded_by_factorial(p):
    seq = fr.moments_Y(p, 8)
    assert all(seq[n] <= math.factorial(n) for n in range(1, 9))


@given(params)
def test_moment_recursion(p):
    # E[Y^n] = n E[Y^(n-1)] / F(n)
    for n in range(1, 6):
        assert fr.moment_Y(p, n) == pytest.approx(n * fr.moment_Y(p, n - 1) / fr.laplace_exponent_F(p, n), rel=1e-12)


def test_G_factor_oracles(p51):
    assert fr.G_factor(p51, 1e4) == pytest.approx(1 - 1e-4, abs=5e-8)
    assert fr.G_factor(p51, 1) == pytest.approx(math.log(2), rel=1e-13)


def test_constant_boundary_and_routes():
    assert fr.c_constant(DistParams(1e-9, 1.0)) == pytest.approx(1.0, abs=1e-6)
    for p in (DistParams(0.5, 1.0), DistParams(0.3, 2.0)):
        r = fr.c_constant_report(p)
        assert r.rel_diff <= 1e-3
    # frozen from the product route at K = 2^15
    assert fr.c_constant(DistParams(0.5, 1.0)) == pytest.approx(1.5925158695941188, rel=1e-9)


def test_factor_moment_oracle(p51):
    assert fr.factor_moment(p51, 1, 1) == pytest.approx((8 * math.log(2) - 4) / (4 * math.log(2)), rel=1e-13)


def test_factor_sampler_means(p51, rng):
    for k in (1, 200):
        x = fr.factor_sample_Y(p51, k, rng, 10**6)
        assert np.all((x > 0) & (x <= 1))
        se = x.std() / math.sqrt(x.size)
        assert abs(x.mean() - fr.factor_moment(p51, k, 1)) < 3 * se


def test_product_and_perpetuity_samplers(p51, rng):
    a = fr.sample_Y_product(p51, 200, rng, 100_000)
    b = fr.sample_Y_perpetuity(p51, rng, 100_000)
    ex = fr.moment_Y(p51, 1)
    for s in (a, b):
        m, se = s.moment(1)
        assert abs(m - ex) < 4 * se
    x = fr.sample_X_product(p51, 200, rng, 1000)
    assert np.all(x.values > 0)


def test_domain_errors(p51):
    with pytest.raises(DomainError):
        DistParams(1.0, 1.0)
    with pytest.raises(DomainError):
        DistParams(0.5, -1.0)
    with pytest.raises(DomainError):
        fr.factor_sample_Y(p51, 0, np.random.default_rng(0))
