"""Uniformity diagnostics for p-value streams.

Kolmogorov-Smirnov tests (one-sample against uniform, two-sample),
fixed-width histograms, and lag-1 autocorrelation. Thresholds use the
asymptotic KS coefficients; all shipped checks run at n >= 1000 where the
asymptotic approximation error is negligible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

KS_COEFFICIENTS = {0.05: 1.358, 0.01: 1.628}


@dataclass(frozen=True)
class KSReport:
    statistic: float
    n: int
    threshold_at_alpha: float
    alpha: float
    reject: bool


def _check_alpha(alpha: float) -> float:
    if alpha not in KS_COEFFICIENTS:
        raise ValueError(f"alpha must be one of {sorted(KS_COEFFICIENTS)}")
    return KS_COEFFICIENTS[alpha]


def ks_uniform(pvalues: Sequence[float], alpha: float = 0.01) -> KSReport:
    """One-sample KS statistic of the sample against Uniform(0, 1)."""
    coeff = _check_alpha(alpha)
    u = np.asarray(pvalues, dtype=float)
    if u.size == 0:
        raise ValueError("empty sample")
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError("values must lie in [0, 1]")
    n = u.size
    u = np.sort(u)
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - u), np.max(u - (i - 1) / n))
    threshold = coeff / np.sqrt(n)
    return KSReport(statistic=float(d), n=int(n),
                    threshold_at_alpha=float(threshold), alpha=alpha,
                    reject=bool(d > threshold))


def two_sample_ks(a: Sequence[float], b: Sequence[float],
                  alpha: float = 0.01) -> KSReport:
    """Two-sample KS statistic, symmetric in its arguments."""
    coeff = _check_alpha(alpha)
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    threshold = coeff * np.sqrt((a.size + b.size) / (a.size * b.size))
    return KSReport(statistic=d, n=int(a.size + b.size),
                    threshold_at_alpha=float(threshold), alpha=alpha,
                    reject=bool(d > threshold))


def histogram(pvalues: Sequence[float],
              bins: int = 20) -> list[tuple[float, float, int]]:
    """Equal-width bin counts over [0, 1]; right-open except the last bin."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    u = np.asarray(pvalues, dtype=float)
    idx = np.clip(np.floor(u * bins).astype(int), 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    edges = np.linspace(0.0, 1.0, bins + 1)
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i]))
            for i in range(bins)]


def lag1_autocorrelation(values: Sequence[float]) -> float:
    """Sample autocorrelation at lag 1."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two values")
    v = v - v.mean()
    denom = float(np.dot(v, v))
    if denom == 0.0:
        return 0.0
    return float(np.dot(v[:-1], v[1:]) / denom)
