"""Gaussian densities, differential entropy and model fitting, all in bits.

Log-densities are base 2 so that typical-set bounds are additive offsets
from the entropy.  Continuous data use differential entropy, so log2
densities can be positive when the covariance is small.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .datamatrix import DataMatrix, as_array
from .errors import DomainError, IllPosedError, SingularCovarianceError

LOG2E = math.log2(math.e)
LOG2_2PI = math.log2(2.0 * math.pi)

#: relative ridge added once when a covariance fails to factorize
REGULARIZATION_SCALE = 1e-10
#: pivots below this fraction of the largest variance count as singular
PIVOT_RTOL = 1e-14


class Estimator(str, enum.Enum):
    SAMPLE = "sample"
    MCD = "mcd"
    KNOWN = "known"


def cholesky_lower(covariance) -> np.ndarray:
    """Lower Cholesky factor; raises SingularCovarianceError with the failing pivot."""
    cov = np.asarray(covariance, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DomainError(f"covariance must be square, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise DomainError("covariance contains non-finite entries")
    if not np.allclose(cov, cov.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(cov).max())):
        raise DomainError("covariance is not symmetric")
    factor, info = lapack.dpotrf(cov, lower=1, clean=1)
    if info > 0:
        raise SingularCovarianceError(info)
    if info < 0:  # pragma: no cover - argument error inside LAPACK
        raise DomainError(f"dpotrf argument {-info} invalid")
    # round-off can leave a tiny positive pivot on an exactly singular matrix
    pivots = np.diag(factor) ** 2
    tiny = np.flatnonzero(pivots <= PIVOT_RTOL * np.max(np.diag(cov)))
    if tiny.size:
        raise SingularCovarianceError(tiny[0] + 1)
    return factor


def regularized_cholesky(covariance) -> tuple[np.ndarray, np.ndarray, float]:
    """Factorize, retrying once with ``delta * I`` where delta = 1e-10 * trace/D.

    Returns ``(covariance_used, factor, delta)``; ``delta`` is 0.0 when no
    ridge was needed.
    """
    cov = np.asarray(covariance, dtype=float)
    try:
        return cov, cholesky_lower(cov), 0.0
    except SingularCovarianceError:
        delta = REGULARIZATION_SCALE * float(np.trace(cov)) / cov.shape[0]
        if not delta > 0:
            raise
        ridged = cov + delta * np.eye(cov.shape[0])
        return ridged, cholesky_lower(ridged), delta


def _log2_det_from_factor(factor: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log2(np.diag(factor))))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Immutable multivariate Gaussian with cached factorization.

    Build with :meth:`from_moments` or :func:`fit_gaussian` rather than the
    raw constructor.  ``provenance`` records how the moments were obtained
    (estimator settings, any regularization ridge).
    """

    mean: np.ndarray
    covariance: np.ndarray
    chol_factor: np.ndarray
    log2_det: float
    entropy_bits: float
    estimator: Estimator = Estimator.KNOWN
    provenance: Mapping = field(default_factory=dict)

    @classmethod
    def from_moments(cls, mean, covariance, estimator=Estimator.KNOWN,
                     regularize=False, provenance=None) -> "GaussianModel":
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(covariance, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DomainError(f"mean of length {mean.size} incompatible with covariance {cov.shape}")
        prov = dict(provenance or {})
        if regularize:
            cov, factor, delta = regularized_cholesky(cov)
            prov["regularization"] = delta
        else:
            factor = cholesky_lower(cov)
            prov.setdefault("regularization", 0.0)
        log2_det = _log2_det_from_factor(factor)
        return cls(
            mean=_freeze(mean),
            covariance=_freeze(cov),
            chol_factor=_freeze(factor),
            log2_det=log2_det,
            entropy_bits=_entropy_from_log2_det(mean.size, log2_det),
            estimator=Estimator(estimator),
            provenance=MappingProxyType(prov),
        )

    @classmethod
    def standard(cls, dim: int) -> "GaussianModel":
        """The known isotropic model N(0, I_dim)."""
        return cls.from_moments(np.zeros(dim), np.eye(dim))

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def regularized(self) -> bool:
        return self.provenance.get("regularization", 0.0) > 0


def _entropy_from_log2_det(dim: int, log2_det: float) -> float:
    # 0.5 D (1 + ln 2pi) + 0.5 ln|S|, converted to bits
    return 0.5 * dim * (LOG2E + LOG2_2PI) + 0.5 * log2_det


def _check_variance(variance):
    if not variance > 0:
        raise DomainError(f"variance must be positive, got {variance}")


def log2_density_univariate(x: float, mean: float, variance: float) -> float:
    _check_variance(variance)
    return -0.5 * math.log2(2.0 * math.pi * variance) - 0.5 * (x - mean) ** 2 / variance * LOG2E


def entropy_univariate(variance: float) -> float:
    """Differential entropy of N(mu, variance) in bits; independent of mu."""
    _check_variance(variance)
    return 0.5 * math.log2(2.0 * math.pi * math.e * variance)


def entropy_multivariate(covariance) -> float:
    """Differential entropy in bits of a Gaussian with the given covariance.

    The log-determinant comes from the Cholesky diagonal.  A covariance
    that does not factorize raises :class:`SingularCovarianceError`.
    """
    factor = cholesky_lower(np.atleast_2d(covariance))
    return _entropy_from_log2_det(factor.shape[0], _log2_det_from_factor(factor))


def squared_mahalanobis(points, model: GaussianModel) -> np.ndarray:
    """Squared whitened distances of each row of ``points`` to the model mean."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if X.shape[1] != model.dim:
        raise DomainError(f"points have dimension {X.shape[1]}, model has {model.dim}")
    z = solve_triangular(model.chol_factor, (X - model.mean).T, lower=True, check_finite=False)
    return np.einsum("ij,ij->j", z, z)


def log2_density(points, model: GaussianModel) -> np.ndarray:
    """Vectorized log2 density for each row of ``points``."""
    q = squared_mahalanobis(points, model)
    return -0.5 * q * LOG2E - 0.5 * model.log2_det - 0.5 * model.dim * LOG2_2PI


def log2_density_multivariate(x, model: GaussianModel) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != model.dim:
        raise DomainError(f"point of length {x.size} does not match model dimension {model.dim}")
    return float(log2_density(x[None, :], model)[0])


def sample_moments(data) -> tuple[np.ndarray, np.ndarray]:
    """Column means and the (n-1)-denominator covariance."""
    X = as_array(data)
    if X.shape[0] < 2:
        raise DomainError(f"need at least 2 observations, got {X.shape[0]}")
    mean = X.mean(axis=0)
    centred = X - mean
    cov = centred.T @ centred / (X.shape[0] - 1)
    return mean, 0.5 * (cov + cov.T)


def fit_gaussian(data, estimator="sample", seed: int = 0, **mcd_options) -> GaussianModel:
    """Estimate a Gaussian model from data.

    Parameters
    ----------
    data : DataMatrix or array_like, shape (n, D)
    estimator : {"sample", "mcd"}
        ``"sample"`` uses the arithmetic mean and (n-1) covariance and needs
        n > D.  ``"mcd"`` runs :func:`typicality.robust.fast_mcd`.
    seed : int
        Seed for the MCD subset search (ignored by the sample estimator).
    **mcd_options
        ``h`` and ``n_starts`` forwarded to ``fast_mcd``.

    A covariance that fails to factorize is retried once with a small ridge;
    the ridge is recorded in ``model.provenance["regularization"]``.
    """
    estimator = Estimator(estimator)
    X = as_array(data)
    n, dim = X.shape
    if estimator is Estimator.SAMPLE:
        if n <= dim:
            raise IllPosedError(f"sample covariance is ill-posed with n={n} <= D={dim}")
        mean, cov = sample_moments(X)
        return GaussianModel.from_moments(mean, cov, Estimator.SAMPLE, regularize=True,
                                          provenance={"n": n})
    if estimator is Estimator.MCD:
        from .robust import fast_mcd

        result = fast_mcd(X, seed=seed, **mcd_options)
        prov = {
            "n": n,
            "h": int(result.support.sum()),
            "n_starts": result.n_starts,
            "seed": result.seed,
            "consistency_factor": result.consistency_factor,
            "regularized_steps": result.regularized,
        }
        return GaussianModel.from_moments(result.mean, result.covariance, Estimator.MCD,
                                          regularize=True, provenance=prov)
    raise DomainError("the 'known' estimator has nothing to fit; use GaussianModel.from_moments")


def empirical_entropy_estimate(data, model: GaussianModel) -> float:
    """Average negative log2 density of the data under ``model`` (AEP estimate of H)."""
    if isinstance(data, DataMatrix):
        X = data.to_array()
    else:
        X = np.atleast_2d(np.asarray(data, dtype=float))
    if X.size == 0 or X.shape[0] == 0:
        raise DomainError("cannot estimate entropy from zero observations")
    return float(-np.mean(log2_density(X, model)))
