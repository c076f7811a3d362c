import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from alphasun import perpetuity as pp
from alphasun import storage_sim as ss
from alphasun import sun_frechet as fr
from alphasun.errors import ConfigurationError, DomainError
from alphasun.params import DistParams


def test_alpha_sun_exponent_matches_F(p51):
    spec = pp.builtin_spec("alpha_sun", p51)
    assert spec.exponent(1.0) == pytest.approx(2 * math.log(2), rel=1e-13)
    assert pp.laplace_exponent(spec, 1.0) == pytest.approx(2 * math.log(2), rel=1e-10)


@pytest.mark.parametrize("name", ["alpha_sun", "alpha_sun_hat", "bessel_local_time"])
def test_exponent_ratio_limit(name):
    spec = pp.builtin_spec(name, 0.5, 1.0)
    assert spec.exponent(1e4 + 1) / spec.exponent(1e4) == pytest.approx(1.0, abs=1e-3)


@given(st.floats(0.1, 0.9), st.floats(0.3, 3.0), st.floats(0.5, 20))
def test_quadrature_exponent_matches_closed_forms(a, g, lam):
    for name in ("alpha_sun", "alpha_sun_hat", "bessel_local_time"):
        spec = pp.builtin_spec(name, a, g)
        assert pp.laplace_exponent(spec, lam) == pytest.approx(float(spec.exponent(lam)), rel=1e-8)


def test_jumpless_moments():
    spec = pp.builtin_spec("jumpless", 1.0, 1.0)
    assert pp.perpetuity_moment(spec, 3) == pytest.approx(0.25, rel=1e-14)
    assert pp.perpetuity_moment(spec, 0) == 1.0


def test_bessel_spec_flags():
    s = pp.builtin_spec("bessel_local_time", 0.5, 1.0)
    assert s.infinite_activity and math.isinf(s.total_mass)
    assert s.tail_singularity == 0.5
    with pytest.raises(ConfigurationError):
        pp.simulate_perpetuity(s, np.random.default_rng(0), 10)


def test_unknown_spec():
    with pytest.raises(ConfigurationError):
        pp.builtin_spec("nope")


def test_spec_validation():
    with pytest.raises(DomainError):
        pp.SubordinatorSpec(q=0.0, b=0.0, tail=lambda t: 0 * t, total_mass=0.0)
    with pytest.raises(DomainError):
        pp.SubordinatorSpec(q=-1.0, b=0.0, tail=lambda t: 0 * t, total_mass=0.0)


@pytest.mark.parametrize("name", ["alpha_sun", "alpha_sun_hat"])
def test_factor_law_mass(name):
    spec = pp.builtin_spec(name, 0.5, 1.0)
    for k in (1, 5, 40):
        f = pp.factor_law(spec, k)
        assert f.ac_mass() + f.atom_weight == pytest.approx(1.0, abs=1e-9)


def test_factor_law_atom_for_jumpless():
    f = pp.factor_law(pp.builtin_spec("jumpless", 1.0, 2.0), 3)
    assert f.atom_weight == pytest.approx(6.0 / 7.0)


@pytest.mark.parametrize("name", ["alpha_sun", "alpha_sun_hat"])
def test_simulation_matches_moments(name, rng):
    spec = pp.builtin_spec(name, 0.5, 1.0)
    b = pp.simulate_perpetuity(spec, rng, 100_000)
    for n in (1, 2):
        m, se = b.moment(n)
        assert abs(m - pp.perpetuity_moment(spec, n)) < 4 * se


def test_bessel_simulation_mean(rng):
    spec = pp.builtin_spec("bessel_local_time", 0.5, 1.0)
    b = pp.simulate_perpetuity(spec, rng, 20_000, jump_eps=1e-3)
    m, se = b.moment(1)
    # truncating jumps below 1e-3 into drift biases the mean by far less than the noise
    assert abs(m - pp.perpetuity_moment(spec, 1)) < 4 * se + 1e-3


def test_product_sampler_matches(rng):
    spec = pp.builtin_spec("alpha_sun_hat", 0.4, 1.5)
    b = pp.sample_product(spec, 100, rng, 50_000)
    m, se = b.moment(1)
    assert abs(m - pp.perpetuity_moment(spec, 1)) < 4 * se


def test_jumpless_product_is_beta(rng):
    gamma = 1.5
    b = pp.sample_product(pp.builtin_spec("jumpless", gamma, 1.0), 200, rng, 100_000)
    ks = ss.ks_distance(b, lambda x: special.betainc(1.0, gamma, np.clip(x, 0, 1)))
    assert ks < 0.01


def test_beta_product(rng):
    b = pp.sample_beta_product(2.0, 3.0, 200, rng, 100_000)
    ks = ss.ks_distance(b, lambda x: special.betainc(2.0, 3.0, np.clip(x, 0, 1)))
    assert ks < 0.01


@pytest.mark.parametrize("a, g", [(0.25, 0.5), (0.5, 1.0), (0.75, 1.5)])
def test_bessel_identities(a, g):
    for n in (1, 2, 3, 4):
        assert pp.bessel_identities(a, g, n).max_rel_error < 1e-6


def test_ggc_condition():
    assert pp.ggc_condition(0.5, 1.0)
    assert pp.ggc_condition(0.1, 0.2)
    assert not pp.ggc_condition(0.9, 0.5)
    assert not pp.ggc_condition(0.8, 3.0)


@given(st.floats(0.01, 100), st.floats(-3, 3))
def test_log_gamma_ratio_matches_gammaln(a, s):
    if a + s <= 0:
        return
    want = special.gammaln(a + s) - special.gammaln(a)
    got = float(pp.log_gamma_ratio(np.array([a]), s)[0])
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_alpha_sun_perpetuity_equals_frechet_moments(p51):
    spec = pp.builtin_spec("alpha_sun", p51)
    for n in range(1, 6):
        assert pp.perpetuity_moment(spec, n) == pytest.approx(fr.moment_Y(p51, n), rel=1e-12)
