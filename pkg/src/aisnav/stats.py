"""Student t tests with a self-contained t distribution.

The two-tailed tail probability of Student's t with ``df`` degrees of freedom
is the regularized incomplete beta function ``I_x(df/2, 1/2)`` evaluated at
``x = df / (df + t^2)``. The incomplete beta is computed from its continued
fraction with the modified Lentz method.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

_TINY = 1e-300
_EPS = 1e-16
_MAX_ITER = 10000


class TTestResult(NamedTuple):
    statistic: float
    df: float
    pvalue: float


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
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
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)`` for a, b > 0."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_two_tailed(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with `df` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_two_tailed(t, df)
    return 1.0 - tail if t > 0 else tail


def t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T >= t)."""
    return t_cdf(-t, df)


def _mean_var(x: Sequence[float]) -> tuple[float, float, int]:
    n = len(x)
    m = math.fsum(x) / n
    v = math.fsum((xi - m) ** 2 for xi in x) / (n - 1)
    return m, v, n


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sample t test without assuming equal variances.

    Returns the statistic for ``mean(a) - mean(b)``, the Welch-Satterthwaite
    degrees of freedom and the two-tailed p-value.
    """
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least 2 values")
    ma, va, na = _mean_var(a)
    mb, vb, nb = _mean_var(b)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    if se2 <= 0:
        raise ValueError("both samples have zero variance")
    t = (ma - mb) / math.sqrt(se2)
    df = se2 ** 2 / (sa ** 2 / (na - 1) + sb ** 2 / (nb - 1))
    return TTestResult(t, df, t_two_tailed(t, df))


def paired_t_test(differences: Sequence[float]) -> TTestResult:
    """One-sample t test of paired differences against zero."""
    if len(differences) < 2:
        raise ValueError("need at least 2 differences")
    m, v, n = _mean_var(differences)
    if v <= 0:
        raise ValueError("differences have zero variance")
    t = m / math.sqrt(v / n)
    df = n - 1
    return TTestResult(t, float(df), t_two_tailed(t, df))
