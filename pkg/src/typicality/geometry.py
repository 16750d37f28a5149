"""Closed-form high-dimensional geometry.

Volumes are evaluated in log space with ``gammaln`` so that ratios stay
finite well past D = 1000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError


@dataclass(frozen=True)
class VolumeCurve:
    dims: list[int]
    values: list[float]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise DomainError("dims must be strictly increasing")
        if len(self.dims) != len(self.values):
            raise DomainError("dims and values differ in length")


def _exp(logvalue: float) -> float:
    # beyond ~D=700 cube volumes and ratios exceed double range; use the log_* forms there
    try:
        return math.exp(logvalue)
    except OverflowError:
        return math.inf


def _check_dim(D):
    if int(D) != D or D < 1:
        raise DomainError(f"dimension must be a positive integer, got {D}")


def _check_positive(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value}")


def log_hypersphere_volume(D: int, radius: float = 1.0) -> float:
    _check_dim(D)
    _check_positive("radius", radius)
    return D * math.log(radius) + 0.5 * D * math.log(math.pi) - float(gammaln(0.5 * D + 1.0))


def hypersphere_volume(D: int, radius: float = 1.0) -> float:
    """Volume of the D-ball of the given radius: r^D pi^(D/2) / Gamma(D/2 + 1)."""
    return _exp(log_hypersphere_volume(D, radius))


def log_hypercube_volume(D: int, side: float = 1.0) -> float:
    _check_dim(D)
    _check_positive("side", side)
    return D * math.log(side)


def hypercube_volume(D: int, side: float = 1.0) -> float:
    return _exp(log_hypercube_volume(D, side))


def log_cube_sphere_ratio(D: int) -> float:
    return log_hypercube_volume(D, 2.0) - log_hypersphere_volume(D, 1.0)


def cube_sphere_ratio(D: int) -> float:
    """Volume of the side-2 cube over that of its inscribed unit ball."""
    return _exp(log_cube_sphere_ratio(D))


def expected_norm(D: int) -> tuple[float, float]:
    """Expected Euclidean norm of a standard D-dimensional Gaussian vector.

    Returns ``(asymptotic, exact)`` where ``asymptotic = sqrt(D)`` and
    ``exact`` is the chi(D) mean ``sqrt(2) Gamma((D+1)/2) / Gamma(D/2)``.
    """
    _check_dim(D)
    exact = math.sqrt(2.0) * math.exp(float(gammaln(0.5 * (D + 1)) - gammaln(0.5 * D)))
    return math.sqrt(D), exact


def sphere_volume_curve(dims) -> VolumeCurve:
    dims = [int(d) for d in dims]
    return VolumeCurve(dims, [hypersphere_volume(d) for d in dims])


def cube_sphere_ratio_curve(dims) -> VolumeCurve:
    dims = [int(d) for d in dims]
    return VolumeCurve(dims, [cube_sphere_ratio(d) for d in dims])


def geometry_table(max_d: int) -> dict[str, np.ndarray]:
    """Per-dimension columns for D = 1..max_d, ready for CSV output."""
    _check_dim(max_d)
    dims = np.arange(1, max_d + 1)
    norms = [expected_norm(int(d)) for d in dims]
    return {
        "D": dims,
        "sphere_volume": np.array([hypersphere_volume(int(d)) for d in dims]),
        "cube_volume": np.array([hypercube_volume(int(d), 2.0) for d in dims]),
        "cube_sphere_ratio": np.array([cube_sphere_ratio(int(d)) for d in dims]),
        "expected_norm_sqrt": np.array([a for a, _ in norms]),
        "expected_norm_exact": np.array([e for _, e in norms]),
    }
