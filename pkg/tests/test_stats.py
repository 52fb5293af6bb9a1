import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from stylometrics.stats import (SingularDesignError, ZeroVarianceError, anova_oneway, betainc,
                                f_pvalue, pca_2d, pearson, polyfit, t_pvalue_two_sided, welch_t)


def test_polyfit_exact_cubic():
    x = np.linspace(-3, 4, 12)
    fit = polyfit(x, 1 + 2 * x - x ** 3, 3)
    assert np.allclose(fit.coefficients, [1, 2, 0, -1], atol=1e-8)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)


def test_polyfit_constant():
    fit = polyfit(np.arange(10.0), np.full(10, 3.0), 3)
    assert fit.r2 == 0 and fit.p_value == 1


def test_polyfit_matches_pinv_oracle():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 10, 10)
    y = rng.standard_normal(10)
    V = np.vander(x, 4, increasing=True)
    beta = np.linalg.pinv(V) @ y
    resid = y - V @ beta
    r2 = 1 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))
    fit = polyfit(x, y, 3)
    assert np.allclose(fit.coefficients, beta, rtol=1e-9, atol=1e-10)
    assert fit.r2 == pytest.approx(r2, rel=1e-10)
    f = (r2 / 3) / ((1 - r2) / 6)
    assert fit.f_ratio == pytest.approx(f, rel=1e-9)
    assert fit.p_value == pytest.approx(sps.f.sf(f, 3, 6), rel=1e-8)
    assert fit.r2_adj == pytest.approx(1 - (1 - r2) * 9 / 6, rel=1e-10)


def test_polyfit_singular():
    with pytest.raises(SingularDesignError):
        polyfit(np.ones(8), np.arange(8.0), 3)


def test_f_pvalue_reference_points():
    assert f_pvalue(0, 3, 6) == 1.0
    assert f_pvalue(1.0, 1, 1) == pytest.approx(0.5, abs=1e-12)
    assert f_pvalue(4.76, 3, 6) == pytest.approx(0.05, abs=0.002)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 50), st.integers(1, 40), st.integers(1, 400))
def test_f_pvalue_vs_scipy(f, d1, d2):
    assert f_pvalue(f, d1, d2) == pytest.approx(sps.f.sf(f, d1, d2), rel=1e-7, abs=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30), st.floats(0.5, 300))
def test_t_pvalue_vs_scipy(t, df):
    assert t_pvalue_two_sided(t, df) == pytest.approx(2 * sps.t.sf(abs(t), df), rel=1e-7, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 30), st.floats(0.1, 30), st.floats(0, 1))
def test_betainc_vs_scipy(a, b, x):
    from scipy.special import betainc as ref
    assert betainc(a, b, x) == pytest.approx(ref(a, b, x), rel=1e-9, abs=1e-14)


def test_pearson():
    x = np.array([1.0, 2, 3, 4, 5])
    assert pearson(x, 2 * x + 1) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    y = np.array([2.0, 1, 4, 3, 5])
    assert pearson(x, y) == pytest.approx(0.8, abs=1e-12)  # hand value: 8 / 10
    with pytest.raises(ZeroVarianceError):
        pearson(x, np.ones(5))


def test_anova():
    a = anova_oneway([[1, 2, 3], [1, 2, 3], [0, 2, 4]])
    assert a.f_ratio == pytest.approx(0.0, abs=1e-12) and a.p_value == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    sep = anova_oneway([rng.normal(0, 1, 20), rng.normal(10, 1, 20)])
    assert sep.p_value < 1e-3
    # textbook three-group example
    g = [[6, 8, 4, 5, 3, 4], [8, 12, 9, 11, 6, 8], [13, 9, 11, 8, 7, 12]]
    ref = sps.f_oneway(*g)
    res = anova_oneway(g)
    assert res.f_ratio == pytest.approx(9.264705882352942, rel=1e-12)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-8)


def test_welch_vs_scipy():
    a, b = [1.0, 2.5, 3.1, 4.4, 2.2], [3.0, 5.5, 6.1, 4.0, 7.2, 6.6]
    ref = sps.ttest_ind(a, b, equal_var=False)
    res = welch_t(a, b)
    assert res.t == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p_value == pytest.approx(ref.pvalue, rel=1e-8)


def test_pca_plane_isometry():
    rng = np.random.default_rng(5)
    basis, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    pts = rng.standard_normal((30, 2)) * [3, 1] @ basis.T + rng.standard_normal(5)
    proj = pca_2d(pts).points
    d_in = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    d_out = np.linalg.norm(proj[:, None] - proj[None], axis=-1)
    assert np.allclose(d_in, d_out, atol=1e-6)


def test_pca_isotropic_split():
    rng = np.random.default_rng(9)
    res = pca_2d(rng.standard_normal((4000, 2)))
    share = res.explained_variance / res.explained_variance.sum()
    assert abs(share[0] - 0.5) < 0.05


def test_pca_rank_deficient_warns(caplog):
    with caplog.at_level(logging.WARNING):
        res = pca_2d(np.tile([1.0, 2.0, 3.0], (5, 1)))
    assert "rank" in caplog.text
    assert np.all(res.points == 0)


def test_pca_deterministic():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((20, 6))
    assert np.array_equal(pca_2d(X).points, pca_2d(X).points)
