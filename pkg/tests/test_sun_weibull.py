import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from alphasun import sun_weibull as sw
from alphasun.params import DistParams

params = st.builds(DistParams, st.floats(0.05, 0.9), st.floats(0.3, 3.0))


def phi_quad(p, lam):
    # Phi-hat(lam) = lam int_{alpha^gamma}^1 x^(lam-1) (1 - alpha x^(-1/gamma))^gamma dx
    f = lambda x: lam * x ** (lam - 1) * (1 - p.alpha * x ** (-1 / p.gamma)) ** p.gamma
    return integrate.quad(f, p.alpha**p.gamma, 1, epsrel=1e-13, limit=200)[0]


def test_phi_hat_oracles(p51):
    assert sw.phi_hat(p51, 1.0) == pytest.approx((1 - math.log(2)) / 2, rel=1e-13)
    assert sw.phi_hat(p51, 0.0) == 0.0
    assert sw.phi_hat(p51, 1e4) == pytest.approx(0.5, abs=1e-3)


@given(params, st.floats(0.5, 30))
def test_phi_hat_matches_quadrature(p, lam):
    assert sw.phi_hat(p, lam) == pytest.approx(phi_quad(p, lam), rel=1e-8)


def test_jump_tail_hat_oracles(p51):
    assert sw.levy_jump_tail_hat(p51, 0.0) == pytest.approx(0.5, rel=1e-14)
    assert sw.levy_jump_tail_hat(p51, math.log(2)) == 0.0
    p = DistParams(0.5, 2.0)
    assert sw.levy_jump_tail_hat(p, math.log(2)) == pytest.approx((1 - 0.5 * math.sqrt(2)) ** 2, rel=1e-12)
    assert sw.jump_support_hat(p) == pytest.approx(2 * math.log(2))


def test_moment_oracles(p51):
    assert sw.moment_Yhat(p51, 1) == pytest.approx(2 / (1 - math.log(2)), rel=1e-13)
    assert sw.moment_Yhat(p51, 0) == 1.0
    assert sw.moment_Yhat(p51, 2) == pytest.approx(2 / (sw.phi_hat(p51, 1) * sw.phi_hat(p51, 2)), rel=1e-13)
    assert sw.moment_Zhat(p51, 1) == pytest.approx(math.log(2) - 0.5, rel=1e-12)
    assert sw.m_constant(p51) == pytest.approx(math.log(2) - 0.5, rel=1e-12)
    assert sw.moment_Zhat(p51, 0) == 1.0


@given(params, st.integers(1, 6))
def test_zhat_routes_agree(p, n):
    a, b = sw.moment_Zhat_routes(p, n)
    assert a == pytest.approx(b, rel=1e-8)


def test_factor_sampler(rng):
    p = DistParams(0.5, 2.0)
    for k in (1, 50):
        x = sw.factor_sample_Yhat(p, k, rng, 200_000)
        assert x.min() >= sw.factor_support_hat(p)
        assert abs(x.mean() - sw.factor_moment_hat(p, k, 1)) < 4 * x.std() / math.sqrt(x.size)


def test_product_sampler_mean(p51, rng):
    b = sw.sample_Yhat_product(p51, 200, rng, 100_000)
    m, se = b.moment(1)
    assert abs(m - sw.moment_Yhat(p51, 1)) < 4 * se


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_mdet_threshold_inclusive(gamma):
    p = DistParams(0.5, gamma)
    for fn in (sw.mdet_verdict_hat, sw.mdet_verdict_frechet):
        assert fn(p, 2 * gamma).m_det
        assert not fn(p, 3 * gamma).m_det
        assert fn(p, 2 * gamma - 0.1).curve_diverges
        assert not fn(p, 2 * gamma + 0.1).curve_diverges
    assert not sw.mdet_verdict_hat(p, -1.0).m_det


def test_krein_growth_rates_gamma1():
    p = DistParams(0.5, 1.0)
    # t = gamma: integrand -log g(x^2)/(1+x^2) ~ (1-alpha)^(-1) x^2/(1+x^2), linear growth
    (x1, v1), (x2, v2) = sw.mdet_verdict_frechet(p, 1.0).krein_growth_curve[-2:]
    assert (v2 - v1) / (x2 - x1) == pytest.approx(2.0, rel=1e-3)
    # t = 2 gamma: the density of Y^2 gives (1-alpha)^(-1) x/(1+x^2), logarithmic growth
    (x1, v1), (x2, v2) = sw.mdet_verdict_frechet(p, 2.0).krein_growth_curve[-2:]
    assert (v2 - v1) / math.log(x2 / x1) == pytest.approx(2.0, rel=1e-3)


def test_mdet_rejects_zero():
    with pytest.raises(ValueError):
        sw.mdet_verdict_hat(DistParams(0.5, 1.0), 0.0)


def test_asymptotic_density_and_fit():
    p = DistParams(0.4, 1.5)
    x = np.linspace(3, 8, 50)
    pdf = sw.asymptotic_density_inf(p, x, 2.5)
    fit = sw.fit_c_hat(p, x, pdf, 3, 8)
    assert fit.c == pytest.approx(2.5, rel=1e-12)
    assert fit.rel_residual < 1e-12
