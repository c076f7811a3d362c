import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from alphasun import specfun as S
from alphasun.errors import DomainError


@pytest.mark.parametrize("x, want", [(1.0, 0.0), (2.0, 0.0), (0.5, 0.5723649429247001)])
def test_ln_gamma_oracles(x, want):
    assert S.ln_gamma(x) == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("x, want", [(1.0, -0.5772156649015329), (2.0, 0.42278433509846713),
                                     (0.5, -1.9635100260214235)])
def test_digamma_oracles(x, want):
    assert S.digamma(x) == pytest.approx(want, rel=1e-13)


@given(st.floats(0.05, 50))
def test_digamma_recurrence(x):
    assert S.digamma(x + 1) - S.digamma(x) == pytest.approx(1 / x, rel=1e-10, abs=1e-12)


def test_2f1_closed_forms():
    assert S.gauss_2f1(1, 1, 2, 0.5) == pytest.approx(1.3862943611198906, rel=1e-14)
    # negative argument: Pfaff path
    assert S.gauss_2f1(1, 1, 2, -1.0) == pytest.approx(math.log(2), rel=1e-14)


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.2, 4), st.floats(-20, 0.95))
def test_2f1_matches_mpmath(a, b, c, z):
    want = float(mpmath.hyp2f1(a, b, c, z))
    assert S.gauss_2f1(a, b, c, z) == pytest.approx(want, rel=1e-10)


def test_2f1_rejects_z_at_one():
    with pytest.raises(DomainError):
        S.gauss_2f1(1, 1, 2, 1.0)


def test_mittag_leffler_oracles():
    assert S.mittag_leffler(0.3, 0.0) == 1.0
    assert S.mittag_leffler(1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    # E_{1/2}(z) = exp(z^2) erfc(-z)
    assert S.mittag_leffler(0.5, 1.0) == pytest.approx(math.exp(1) * math.erfc(-1), rel=1e-13)
    assert S.mittag_leffler(0.5, -2.0) == pytest.approx(math.exp(4) * math.erfc(2), rel=1e-10)


@given(st.floats(0.3, 1.0), st.floats(-5, 3))
def test_mittag_leffler_matches_mpmath(alpha, z):
    with mpmath.workdps(80):
        # plain summation: nsum's extrapolation misjudges the slow initial growth
        zz, acc, k = mpmath.mpf(z), mpmath.mpf(0), 0
        while True:
            t = zz**k / mpmath.gamma(1 + mpmath.mpf(alpha) * k)
            acc += t
            if k > 10 and abs(t) < mpmath.mpf(10) ** -30 * max(abs(acc), 1):
                break
            k += 1
        want = acc
    assert S.mittag_leffler(alpha, z) == pytest.approx(float(want), rel=1e-9, abs=1e-14)


@given(st.floats(0.05, 1.0), st.floats(-5, 5))
def test_log_mittag_leffler_consistent(alpha, z):
    v = S.mittag_leffler(alpha, z)
    if math.isfinite(v) and v > 1e-300:
        assert S.log_mittag_leffler(alpha, z) == pytest.approx(math.log(v), rel=1e-9, abs=1e-11)


def test_mittag_leffler_domain():
    with pytest.raises(DomainError):
        S.mittag_leffler(0.0, 1.0)
    with pytest.raises(DomainError):
        S.mittag_leffler(0.5, 60.0)


def test_hyp2f1_array_agrees():
    a = np.linspace(0.1, 3, 7)
    v = S.hyp2f1_array(a, 1.5, 2.5, 0.6)
    assert np.allclose(v, [S.gauss_2f1(x, 1.5, 2.5, 0.6) for x in a], rtol=1e-12)


def test_eval_options_validation():
    with pytest.raises(DomainError):
        S.EvalOptions(rel_tol=0.1)
    with pytest.raises(DomainError):
        S.EvalOptions(max_terms=3)
