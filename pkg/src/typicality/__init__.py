"""Typicality-based multivariate outlier detection under a Gaussian model."""

__version__ = "0.1.0"

from .datamatrix import DataMatrix
from .errors import (DataFormatError, DomainError, IllPosedError, SingularCovarianceError,
                     TypicalityError)
from .gaussian import (Estimator, GaussianModel, empirical_entropy_estimate, entropy_multivariate,
                       entropy_univariate, fit_gaussian, log2_density, log2_density_multivariate,
                       log2_density_univariate, sample_moments)
from .geometry import cube_sphere_ratio, expected_norm, hypercube_volume, hypersphere_volume
from .outliers import (Category, OutlierVerdict, TypicalityBand, annulus_bounds,
                       classify_mahalanobis, classify_typicality, compare_methods,
                       mahalanobis_distance, typicality_band)
from .report import ExperimentReport
from .robust import McdResult, c_step, fast_mcd

__all__ = [
    "DataMatrix", "DataFormatError", "DomainError", "IllPosedError", "SingularCovarianceError",
    "TypicalityError", "Estimator", "GaussianModel", "empirical_entropy_estimate",
    "entropy_multivariate", "entropy_univariate", "fit_gaussian", "log2_density",
    "log2_density_multivariate", "log2_density_univariate", "sample_moments",
    "cube_sphere_ratio", "expected_norm", "hypercube_volume", "hypersphere_volume",
    "Category", "OutlierVerdict", "TypicalityBand", "annulus_bounds", "classify_mahalanobis",
    "classify_typicality", "compare_methods", "mahalanobis_distance", "typicality_band",
    "ExperimentReport", "McdResult", "c_step", "fast_mcd",
]
