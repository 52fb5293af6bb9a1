"""Least-squares fits, F/t tail probabilities, correlation, ANOVA and a 2-D PCA.

Tail probabilities come from a continued-fraction evaluation of the
regularized incomplete beta function, so nothing here needs scipy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

_EPS = 1e-15
_TINY = 1e-300


class SingularDesignError(ValueError):
    pass


class ZeroVarianceError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    coefficients: np.ndarray  # ascending degree
    r2: float
    r2_adj: float
    f_ratio: float
    p_value: float
    dof: int
    residuals: np.ndarray

    def predict(self, x) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coefficients)


def _betacf(a: float, b: float, x: float, tol: float = 1e-14, max_iter: int = 10000) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise RuntimeError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_pvalue(f_ratio: float, df1: float, df2: float) -> float:
    """Upper-tail probability P(F > f_ratio) of an F(df1, df2) variate."""
    if df1 < 1 or df2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if f_ratio < 0:
        raise ValueError("f_ratio must be >= 0")
    if f_ratio == 0:
        return 1.0
    if math.isinf(f_ratio):
        return 0.0
    x = df2 / (df2 + df1 * f_ratio)
    return min(1.0, max(0.0, betainc(df2 / 2.0, df1 / 2.0, x)))


def t_pvalue_two_sided(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("df must be positive")
    x = df / (df + t * t)
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, x)))


def polyfit(x: Sequence[float], y: Sequence[float], degree: int) -> FitResult:
    """Ordinary least-squares polynomial fit with an overall F-test.

    The design matrix is built on x rescaled to [-1, 1] and solved by QR, then
    the coefficients are mapped back to the original x scale.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if len(y) != n:
        raise ValueError("x and y differ in length")
    if n <= degree + 1:
        raise ValueError(f"need more than {degree + 1} points for a degree-{degree} fit")
    if np.ptp(x) == 0:
        raise SingularDesignError("x values are all equal")

    shift = (x.max() + x.min()) / 2.0
    scale = (x.max() - x.min()) / 2.0
    u = (x - shift) / scale
    design = np.vander(u, degree + 1, increasing=True)
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-12 * diag.max():
        raise SingularDesignError("design matrix is rank deficient")
    beta_u = np.linalg.solve(r, q.T @ y)

    # compose p(u) with u = (x - shift) / scale to get coefficients in x
    lin = np.array([-shift / scale, 1.0 / scale])
    coeffs = np.zeros(degree + 1)
    power = np.array([1.0])
    for k in range(degree + 1):
        coeffs[: len(power)] += beta_u[k] * power
        power = np.polynomial.polynomial.polymul(power, lin)

    fitted = design @ beta_u
    resid = y - fitted
    sse = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    p = degree
    dof = n - p - 1
    if sst == 0.0:
        return FitResult(coeffs, 0.0, 0.0, 0.0, 1.0, dof, resid)
    r2 = min(1.0, max(0.0, 1.0 - sse / sst))
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    if sse <= 1e-30 * sst:
        f_ratio = math.inf
        pval = 0.0
    else:
        f_ratio = ((sst - sse) / p) / (sse / dof)
        pval = f_pvalue(max(f_ratio, 0.0), p, dof)
    return FitResult(coeffs, r2, r2_adj, f_ratio, pval, dof, resid)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    if len(x) < 3:
        raise ValueError("pearson needs at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ZeroVarianceError("zero variance input")
    return float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))


@dataclass(frozen=True)
class AnovaResult:
    f_ratio: float
    p_value: float
    df_between: int
    df_within: int
    r2: float


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """One-way between-groups ANOVA."""
    groups = [np.asarray(g, dtype=float) for g in groups]
    if len(groups) < 2:
        raise ValueError("anova needs at least 2 groups")
    if any(len(g) < 2 for g in groups):
        raise ValueError("every group needs at least 2 values")
    allv = np.concatenate(groups)
    grand = allv.mean()
    ssb = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in groups)
    dfb = len(groups) - 1
    dfw = len(allv) - len(groups)
    if ssw == 0:
        if ssb == 0:
            raise ZeroVarianceError("all values identical")
        return AnovaResult(math.inf, 0.0, dfb, dfw, 1.0)
    f = (ssb / dfb) / (ssw / dfw)
    return AnovaResult(float(f), f_pvalue(float(f), dfb, dfw), dfb, dfw, float(ssb / (ssb + ssw)))


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p_value: float


def welch_t(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    """Two-sided Welch t-test for a pairwise group comparison."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least 2 values")
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    if va + vb == 0:
        raise ZeroVarianceError("both groups are constant")
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
    return WelchResult(float(t), float(df), t_pvalue_two_sided(float(t), float(df)))


@dataclass(frozen=True)
class PCAResult:
    points: np.ndarray  # (n, 2)
    components: np.ndarray  # (2, dim)
    explained_variance: np.ndarray  # (2,)
    total_variance: float


def pca_2d(vectors, seed: int = 1, tol: float = 1e-10, max_iter: int = 10000) -> PCAResult:
    """Project mean-centered vectors onto the top two covariance eigenvectors.

    Eigenvectors come from power iteration with deflation. Each component's
    sign is flipped so its largest-magnitude loading is positive.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2 or X.shape[0] < 3 or X.shape[1] < 2:
        raise ValueError("pca_2d needs >= 3 vectors of dimension >= 2")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (len(X) - 1)
    total = float(np.trace(cov))
    rng = np.random.default_rng(seed)
    comps = np.zeros((2, X.shape[1]))
    evals = np.zeros(2)
    work = cov.copy()
    scale = max(total, _TINY)
    for k in range(2):
        v = rng.standard_normal(X.shape[1])
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(max_iter):
            w = work @ v
            norm = np.linalg.norm(w)
            if norm <= 1e-12 * scale:
                lam = 0.0
                v = np.zeros_like(v)
                break
            w /= norm
            lam_new = float(w @ work @ w)
            converged = abs(lam_new - lam) <= tol * scale and np.linalg.norm(w - v) <= math.sqrt(tol)
            v, lam = w, lam_new
            if converged:
                break
        if lam <= 1e-12 * scale:
            log.warning("pca_2d: input rank < %d; component %d zeroed", k + 1, k + 1)
            v = np.zeros_like(v)
            lam = 0.0
        else:
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
        comps[k] = v
        evals[k] = lam
        work = work - lam * np.outer(v, v)
    return PCAResult(Xc @ comps.T, comps, evals, total)
