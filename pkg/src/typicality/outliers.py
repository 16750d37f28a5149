"""Mahalanobis thresholding, typical-set membership and their comparison."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .datamatrix import as_array
from .errors import DomainError
from .gaussian import LOG2E, GaussianModel, cholesky_lower, log2_density, squared_mahalanobis

DEFAULT_C = 3.0
DEFAULT_EPSILON = 5.0


class Category(str, enum.Enum):
    INLIER = "Inlier"
    BOTH = "Both"
    MAHALANOBIS_ONLY = "MahalanobisOnly"
    TYPICALITY_ONLY = "TypicalityOnly"

    @classmethod
    def from_flags(cls, mahalanobis: bool, typicality: bool) -> "Category":
        if mahalanobis and typicality:
            return cls.BOTH
        if mahalanobis:
            return cls.MAHALANOBIS_ONLY
        if typicality:
            return cls.TYPICALITY_ONLY
        return cls.INLIER


@dataclass(frozen=True)
class TypicalityBand:
    """Closed interval of admissible log2 densities, [-(H + eps), -(H - eps)]."""

    entropy_bits: float
    epsilon: float

    @property
    def lower_log2_density(self) -> float:
        return -(self.entropy_bits + self.epsilon)

    @property
    def upper_log2_density(self) -> float:
        return -(self.entropy_bits - self.epsilon)

    def contains(self, log2_p):
        log2_p = np.asarray(log2_p)
        return (self.lower_log2_density <= log2_p) & (log2_p <= self.upper_log2_density)


@dataclass(frozen=True)
class OutlierVerdict:
    index: int
    mahalanobis_sd: float
    log2_density: float
    is_mahalanobis_outlier: bool
    is_typicality_outlier: bool

    @property
    def category(self) -> Category:
        return Category.from_flags(self.is_mahalanobis_outlier, self.is_typicality_outlier)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["category"] = self.category.value
        return d


def mahalanobis_distance(x, mean, covariance) -> float:
    """Mahalanobis distance of ``x`` from ``mean`` in standard-deviation units.

    Uses a triangular solve against the Cholesky factor.  A covariance that
    is not positive definite raises; no ridge is added here.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    factor = cholesky_lower(np.atleast_2d(covariance))
    if x.shape != mean.shape or x.size != factor.shape[0]:
        raise DomainError("x, mean and covariance dimensions disagree")
    z = solve_triangular(factor, x - mean, lower=True)
    return float(math.sqrt(z @ z))


def typicality_band(model: GaussianModel, epsilon: float = DEFAULT_EPSILON) -> TypicalityBand:
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be non-negative, got {epsilon}")
    return TypicalityBand(model.entropy_bits, float(epsilon))


def _check_c(c):
    if not c > 0:
        raise DomainError(f"threshold c must be positive, got {c}")


def score(data, model: GaussianModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Mahalanobis distance (SD units) and log2 density under ``model``."""
    X = as_array(data)
    d2 = squared_mahalanobis(X, model)
    return np.sqrt(d2), log2_density(X, model)


def _verdicts(dist, log2_p, maha_flags, typ_flags):
    return [
        OutlierVerdict(i, float(dist[i]), float(log2_p[i]), bool(maha_flags[i]), bool(typ_flags[i]))
        for i in range(dist.size)
    ]


def classify_mahalanobis(data, model: GaussianModel, c: float = DEFAULT_C) -> list[OutlierVerdict]:
    """Flag points with Mahalanobis distance strictly greater than ``c``."""
    _check_c(c)
    dist, log2_p = score(data, model)
    return _verdicts(dist, log2_p, dist > c, np.zeros(dist.size, dtype=bool))


def classify_typicality(data, model: GaussianModel,
                        epsilon: float = DEFAULT_EPSILON) -> list[OutlierVerdict]:
    """Flag points whose log2 density falls outside the closed typicality band.

    Both directions count: density above the band (too close to the mean)
    and below it (too far out).
    """
    band = typicality_band(model, epsilon)
    dist, log2_p = score(data, model)
    return _verdicts(dist, log2_p, np.zeros(dist.size, dtype=bool), ~band.contains(log2_p))


def annulus_bounds(D: int, sigma: float = 1.0, epsilon: float = DEFAULT_EPSILON) -> tuple[float, float]:
    """Radii bounding the typical set of the isotropic Gaussian N(0, sigma^2 I_D).

    Solving ``-log2 p(x) = H -/+ eps`` for ``||x||`` gives
    ``r^2 = sigma^2 (D -/+ 2 eps ln 2)``; the inner radius clamps at zero.
    """
    if int(D) != D or D < 1:
        raise DomainError(f"D must be a positive integer, got {D}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be non-negative, got {epsilon}")
    half_width = 2.0 * epsilon / LOG2E
    return sigma * math.sqrt(max(0.0, D - half_width)), sigma * math.sqrt(D + half_width)


def compare_methods(data, model: GaussianModel, c: float = DEFAULT_C,
                    epsilon: float = DEFAULT_EPSILON) -> tuple[list[OutlierVerdict], dict[str, int]]:
    """Classify every point by both rules and count the four agreement categories."""
    _check_c(c)
    band = typicality_band(model, epsilon)
    dist, log2_p = score(data, model)
    verdicts = _verdicts(dist, log2_p, dist > c, ~band.contains(log2_p))
    tally = Counter(v.category for v in verdicts)
    counts = {cat.value: tally.get(cat, 0) for cat in Category}
    return verdicts, counts


def mean_is_atypical(D: int, epsilon: float) -> bool:
    """Whether the mode of any D-dimensional Gaussian lies outside the band.

    The mode's negative log2 density sits exactly ``(D/2) log2 e`` bits
    below the entropy, whatever the covariance.
    """
    return epsilon < 0.5 * D * LOG2E
