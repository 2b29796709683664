"""Bivariate Gaussian data model.

Parameterization, closed-form conditional quantities of Y given X, and
deterministic sampling. The off-diagonal covariance entry is stored as a
covariance; the implied correlation ``r = rho_cov / (sigma_x * sigma_y)``
is what enters the conditional-mean slope and conditional variance, which
is dimensionally correct and coincides with the covariance reading at unit
marginal variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RandomStream

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BivariateGaussian:
    """Mean vector and covariance of a bivariate Gaussian.

    sigma_x and sigma_y are standard deviations; rho_cov is the
    off-diagonal covariance entry.
    """

    mu_x: float
    mu_y: float
    sigma_x: float
    sigma_y: float
    rho_cov: float

    def __post_init__(self):
        if not (self.sigma_x > 0.0 and self.sigma_y > 0.0):
            raise ValueError("standard deviations must be strictly positive")
        if not abs(self.correlation) < 1.0:
            raise ValueError(
                "covariance matrix must be strictly positive definite "
                f"(|correlation| = {abs(self.correlation)} >= 1)"
            )

    @property
    def correlation(self) -> float:
        return self.rho_cov / (self.sigma_x * self.sigma_y)

    def mean(self) -> np.ndarray:
        return np.array([self.mu_x, self.mu_y])

    def covariance(self) -> np.ndarray:
        return np.array(
            [
                [self.sigma_x**2, self.rho_cov],
                [self.rho_cov, self.sigma_y**2],
            ]
        )

    def density(self, x: float, y: float) -> float:
        """Joint pdf at (x, y)."""
        det = self.sigma_x**2 * self.sigma_y**2 - self.rho_cov**2
        dx = x - self.mu_x
        dy = y - self.mu_y
        # quadratic form d^T Sigma^{-1} d, 2x2 inverse written out
        quad = (self.sigma_y**2 * dx * dx - 2.0 * self.rho_cov * dx * dy
                + self.sigma_x**2 * dy * dy) / det
        return math.exp(-0.5 * quad) / (_TWO_PI * math.sqrt(det))


@dataclass(frozen=True)
class Example:
    """One observation z = (x, y) from the stream."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("example coordinates must be finite")


def conditional_mean(q: BivariateGaussian, x: float) -> float:
    """E[Y | X = x] under q."""
    r = q.correlation
    return q.mu_y + r * q.sigma_y * (x - q.mu_x) / q.sigma_x


def conditional_variance(q: BivariateGaussian) -> float:
    """Var[Y | X = x] under q; does not depend on x."""
    r = q.correlation
    return (1.0 - r * r) * q.sigma_y**2


def conditional_density(q: BivariateGaussian, x: float, y: float) -> float:
    """pdf of Y | X = x under q, evaluated at y."""
    var = conditional_variance(q)
    mu = conditional_mean(q, x)
    return math.exp(-0.5 * (y - mu) ** 2 / var) / math.sqrt(_TWO_PI * var)


def sample(q: BivariateGaussian, rng: RandomStream, n: int) -> list[Example]:
    """Draw n examples from q, reproducibly.

    Two uniforms per example feed a Box-Muller transform (so the exact
    normal stream is platform-independent); the resulting standard-normal
    pair is pushed through the lower Cholesky factor of the covariance and
    shifted by the mean.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return []
    u = rng.uniforms(2 * n).reshape(n, 2)
    u1 = 1.0 - u[:, 0]  # (0, 1]: keeps log() finite
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = _TWO_PI * u[:, 1]
    z1 = radius * np.cos(theta)
    z2 = radius * np.sin(theta)
    # lower Cholesky factor of the covariance matrix
    l21 = q.rho_cov / q.sigma_x
    l22 = math.sqrt(q.sigma_y**2 - l21 * l21)
    xs = q.mu_x + q.sigma_x * z1
    ys = q.mu_y + l21 * z1 + l22 * z2
    return [Example(float(x), float(y)) for x, y in zip(xs, ys)]
