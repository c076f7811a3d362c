import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphasun import ide_solver as ide
from alphasun import sun_frechet as fr
from alphasun import sun_weibull as sw
from alphasun.errors import DomainError
from alphasun.params import DistParams


@pytest.fixture(scope="module")
def tdf():
    return ide.solve_frechet(DistParams(0.5, 1.0))


@pytest.fixture(scope="module")
def tdw():
    return ide.solve_weibull(DistParams(0.5, 2.0))


def test_frechet_moments(tdf):
    p = tdf.params
    # E[X^(s-1)] with s - 1 = -n gamma gives E[Y^n]
    for n in (1, 2, 3):
        assert ide.mellin(tdf, 1 - n * p.gamma) == pytest.approx(fr.moment_Y(p, n), rel=1e-8)
    assert ide.mellin(tdf, 1.0) == pytest.approx(1.0, abs=1e-10)


def test_weibull_moments(tdw):
    p = tdw.params
    for n in (1, 2, 3):
        assert ide.mellin(tdw, 1 + n * p.gamma) == pytest.approx(sw.moment_Yhat(p, n), rel=1e-8)


def test_normalization(tdf, tdw):
    for td in (tdf, tdw):
        assert abs(td.normalization_defect) <= 1e-6
        assert ide.cdf(td, td.x[-1] * 1e3) == pytest.approx(1.0, abs=1e-9)


def test_cdf_quantile_roundtrip(tdf, tdw):
    for td in (tdf, tdw):
        for u in (1e-6, 0.1, 0.5, 0.9, 1 - 1e-6):
            assert ide.cdf(td, ide.quantile(td, u)) == pytest.approx(u, rel=1e-8)
        c = ide.cdf(td, td.x)
        assert np.all(np.diff(c) >= 0)


def test_equation_residuals(tdf, tdw):
    for td in (tdf, tdw):
        lo, hi = ide.central_range(td)
        r = ide.equation_residual(td, np.geomspace(lo, hi, 12))
        assert np.max(np.abs(r)) < 1e-6


@pytest.mark.parametrize("s", [-1.0, 0.0, 0.5, 1.0])
def test_mellin_recursion_frechet(tdf, s):
    assert ide.mellin_residual_frechet(tdf, s) < 1e-4


@pytest.mark.parametrize("s", [-2, -1, 0, 1, 2, 3])
def test_mellin_recursion_weibull(tdw, s):
    assert ide.mellin_residual_weibull(tdw, s) < 1e-4


def test_mellin_domain(tdf):
    with pytest.raises(DomainError):
        ide.mellin(tdf, tdf.params.gamma + 1)


def test_frechet_right_tail_constant(tdf):
    gm = tdf.params.gamma
    assert tdf.pdf[-1] * tdf.x[-1] ** (gm + 1) == pytest.approx(gm, rel=0.02)
    assert tdf.right_tail.form == "power"


def test_frechet_left_tail_extrapolates_to_product_constant(tdf):
    icpt, a1, _ = ide.frechet_left_tail_extrapolation(tdf)
    assert icpt == pytest.approx(1.0, abs=0.01)
    assert a1 == pytest.approx(ide.frechet_tail_correction(tdf.params), rel=0.1)


def test_shapes(tdf, tdw):
    r = ide.shape_report(tdf)
    assert (r.first_changes, r.second_changes) == (1, 2)
    w = ide.shape_report(tdw, 1)
    assert w.first_changes == 1 and w.mode > 0


def test_weibull_boundary_member():
    td = ide.solve_weibull(DistParams(1e-6, 2.0))
    lo, hi = ide.central_range(td, 0.99)
    x = np.geomspace(lo, hi, 100)
    ref = 2 * x * np.exp(-(x**2))
    assert np.max(np.abs(td.pdf_at(x) / ref - 1)) < 0.01


def test_frechet_boundary_member():
    td = ide.solve_frechet(DistParams(1e-6, 1.5))
    lo, hi = ide.central_range(td, 0.99)
    x = np.geomspace(lo, hi, 100)
    ref = 1.5 * x**-2.5 * np.exp(-(x**-1.5))
    assert np.max(np.abs(td.pdf_at(x) / ref - 1)) < 0.01


@settings(max_examples=4)
@given(st.floats(0.1, 0.8), st.floats(0.5, 2.5))
def test_coarse_solves_hold_moments(a, g):
    p = DistParams(a, g)
    cfg = ide.GridConfig(points=1024)
    f = ide.solve_frechet(p, cfg)
    w = ide.solve_weibull(p, cfg)
    assert ide.mellin(f, 1 - g) == pytest.approx(fr.moment_Y(p, 1), rel=1e-5)
    assert ide.mellin(w, 1 + g) == pytest.approx(sw.moment_Yhat(p, 1), rel=1e-5)


def test_gumbel_limit():
    assert ide.gumbel_limit_density(0.5, 0.0) == pytest.approx(math.exp(-1) / 2, rel=1e-14)
    x = np.linspace(-25, 40, 40001)
    d = ide.gumbel_limit_density(0.5, x)
    c = ide.gumbel_limit_cdf(0.5, x)
    assert np.trapezoid(d, x) == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(np.gradient(c, x), d, atol=1e-6)
    # alpha -> 0: standard Gumbel
    assert ide.gumbel_limit_cdf(1e-12, 0.7) == pytest.approx(math.exp(-math.exp(-0.7)), rel=1e-10)


@given(st.floats(-30, 30))
def test_softplus_roundtrip(t):
    assert ide._inv_softplus(ide._softplus(np.array([t])))[0] == pytest.approx(t, rel=1e-9, abs=1e-9)


def test_grid_config_validation():
    with pytest.raises(DomainError):
        ide.GridConfig(points=100)
    with pytest.raises(DomainError):
        ide.GridConfig(seed_span=45, far_span=50)
