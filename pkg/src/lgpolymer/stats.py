"""Statistical verification primitives.

One-sample Kolmogorov-Smirnov tests against a fully specified CDF,
moment summaries with standard errors, lag autocorrelation, and the
least-squares slope fit used for exponent extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KsReport",
    "SlopeFit",
    "Moments",
    "ks_statistic",
    "ks_test",
    "slope_fit",
    "moments",
    "autocorr",
]

# Asymptotic critical values c(level) for D_n * sqrt(n).
_KS_CRITICAL = {0.05: 1.36, 0.01: 1.63}


@dataclass(frozen=True)
class KsReport:
    n: int
    statistic: float
    threshold: float
    level: float
    passed: bool

    def __str__(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"KS n={self.n} D={self.statistic:.5f} "
            f"threshold={self.threshold:.5f} ({self.level:.0%}): {verdict}"
        )


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    stderr: float


def ks_statistic(sorted_samples, cdf) -> float:
    """Exact one-sample KS statistic for a sorted sample.

    D = max_i max(i/n - F(x_i), F(x_i) - (i-1)/n).
    """
    x = np.asarray(sorted_samples, dtype=float)
    if x.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    n = x.size
    if np.any(np.diff(x) < 0):
        raise ValueError("samples must be sorted ascending")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_test(sorted_samples, cdf, level: float = 0.01) -> KsReport:
    """KS test against a fully specified CDF at an asymptotic level."""
    if level not in _KS_CRITICAL:
        raise ValueError(f"level must be one of {sorted(_KS_CRITICAL)}, got {level}")
    x = np.asarray(sorted_samples, dtype=float)
    n = x.size
    if n < 8:
        raise ValueError(f"need at least 8 samples for the asymptotic threshold, got {n}")
    d = ks_statistic(x, cdf)
    threshold = _KS_CRITICAL[level] / np.sqrt(n)
    return KsReport(n=n, statistic=d, threshold=float(threshold), level=level, passed=d < threshold)


def slope_fit(x, y) -> SlopeFit:
    """Ordinary least squares line fit with the slope's standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ValueError("need at least 3 (x, y) points")
    sxx = np.sum((x - x.mean()) ** 2)
    if sxx <= 0:
        raise ValueError("x values are degenerate")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = x.size - 2
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx)) if dof > 0 else 0.0
    return SlopeFit(slope=slope, intercept=intercept, stderr=stderr)


def moments(samples) -> Moments:
    """Sample mean, unbiased variance, and standard error of the mean."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    var = float(np.var(x, ddof=1))
    return Moments(mean=float(x.mean()), variance=var, stderr=float(np.sqrt(var / x.size)))


def autocorr(samples, lag: int) -> float:
    """Sample autocorrelation at the given lag."""
    x = np.asarray(samples, dtype=float)
    if not 0 < lag < x.size:
        raise ValueError(f"lag must be in (0, {x.size}), got {lag}")
    c = x - x.mean()
    denom = np.sum(c**2)
    if denom == 0:
        raise ValueError("autocorrelation is degenerate for constant samples")
    return float(np.sum(c[:-lag] * c[lag:]) / denom)
