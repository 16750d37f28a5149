"""Seeded experiments reproducing high-dimensional Gaussian phenomena.

Every experiment is a pure function of its arguments.  Randomness comes from
named substreams of the master seed (see :func:`typicality.report.substream`),
so two experiments never share draws and per-dimension loops do not depend
on evaluation order.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .datamatrix import DataMatrix
from .errors import DomainError
from .gaussian import GaussianModel, cholesky_lower, fit_gaussian, log2_density
from .geometry import expected_norm
from .outliers import DEFAULT_C, DEFAULT_EPSILON, annulus_bounds, compare_methods, typicality_band
from .report import ExperimentReport, substream

# Assumed settings for the planted-outlier scenarios; recorded in report params.
PLANTED_2D_COVARIANCE = ((1.0, 0.5), (0.5, 1.0))
PLANTED_2D_N_INLIERS = 125
PLANTED_2D_N_LINE = 17
PLANTED_2D_LINE_X = 0.0
PLANTED_2D_Y_LIMIT = 4.0
HIGHDIM_N = 1400
HIGHDIM_D = 20
HIGHDIM_N_PLANTED = 15
HIGHDIM_PLANT_RADIUS = 0.5


def sample_gaussian(n: int, D: int, mean=None, covariance=None, seed: int = 0,
                    rng: np.random.Generator | None = None) -> DataMatrix:
    """Draw ``n`` points from N(mean, covariance) as ``mean + L z``.

    ``mean`` defaults to zero and ``covariance`` to the identity.  Pass
    ``rng`` to draw from an existing stream instead of ``seed``.
    """
    if n < 1 or D < 1:
        raise DomainError(f"need n >= 1 and D >= 1, got n={n}, D={D}")
    mean = np.zeros(D) if mean is None else np.asarray(mean, dtype=float)
    if mean.shape != (D,):
        raise DomainError(f"mean must have length {D}")
    rng = substream(seed, "sample_gaussian") if rng is None else rng
    z = rng.standard_normal((n, D))
    if covariance is not None:
        factor = cholesky_lower(np.atleast_2d(covariance))
        if factor.shape != (D, D):
            raise DomainError(f"covariance must be {D} x {D}")
        z = z @ factor.T
    return DataMatrix(z + mean)


def _norms(rng, n, D):
    z = rng.standard_normal((n, D))
    return np.sqrt(np.einsum("ij,ij->i", z, z))


def norm_growth_experiment(D_max: int = 100, n_per_D: int = 200, seed: int = 0) -> ExperimentReport:
    """Mean and 1st/99th percentile norms of standard Gaussian draws for D = 1..D_max.

    Dimension D uses the first D coordinates of a single ``n_per_D x D_max``
    draw, so each point's norm (and hence the mean curve) grows with D.
    """
    if n_per_D < 2:
        raise DomainError(f"n_per_D must be >= 2, got {n_per_D}")
    if D_max < 1:
        raise DomainError(f"D_max must be >= 1, got {D_max}")
    dims = np.arange(1, D_max + 1)
    z = substream(seed, "norm_growth").standard_normal((n_per_D, D_max))
    norms = np.sqrt(np.cumsum(z * z, axis=1))
    mean_norm = norms.mean(axis=0)
    p01, p99 = np.percentile(norms, [1, 99], axis=0)
    sqrt_d = np.sqrt(dims)
    rel = np.abs(mean_norm / sqrt_d - 1.0)
    return ExperimentReport(
        name="norm_growth",
        params={"D_max": D_max, "n_per_D": n_per_D, "seed": seed},
        series={"by_dim": {
            "D": dims,
            "mean_norm": mean_norm,
            "p01": p01,
            "p99": p99,
            "sqrt_D": sqrt_d,
            "chi_mean": np.array([expected_norm(int(d))[1] for d in dims]),
        }},
        summary={
            "max_rel_dev_from_sqrt_D_for_D_ge_10": float(rel[9:].max()) if D_max >= 10 else None,
            "monotone_increasing": bool(np.all(np.diff(mean_norm) > 0)),
        },
    )


def radius_fractions(radii, D: int) -> dict[str, float]:
    """Fractions of radii within 1 and 2 of sqrt(D), and below sqrt(D) - 2."""
    radii = np.asarray(radii)
    centre = math.sqrt(D)
    return {
        "frac_within_1": float(np.mean((radii >= centre - 1) & (radii <= centre + 1))),
        "frac_within_2": float(np.mean((radii >= centre - 2) & (radii <= centre + 2))),
        "frac_below_minus_2": float(np.mean(radii < centre - 2)),
    }


def ks_critical_value(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) * math.sqrt((n + m) / (n * m))


def radii_distribution_experiment(D: int = 40, n: int = 10_000, seed: int = 0) -> ExperimentReport:
    """Squared norms of N(0, I_D) draws next to independent chi-square(D) draws."""
    if n < 100:
        raise DomainError(f"n must be >= 100, got {n}")
    sq = _norms(substream(seed, "radii/gaussian"), n, D) ** 2
    ref = substream(seed, "radii/chi2").chisquare(D, size=n)
    ks = stats.ks_2samp(sq, ref)
    summary = {
        "mean_sq_norm": float(sq.mean()),
        "var_sq_norm": float(sq.var(ddof=1)),
        "mean_chi2_reference": float(ref.mean()),
        "var_chi2_reference": float(ref.var(ddof=1)),
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "ks_critical_0.01": ks_critical_value(n, n, 0.01),
    }
    summary.update(radius_fractions(np.sqrt(sq), D))
    return ExperimentReport(
        name="radii_distribution",
        params={"D": D, "n": n, "seed": seed},
        series={"samples": {"squared_norm": sq, "chi2_reference": ref}},
        summary=summary,
    )


def typical_set_coverage_experiment(D: int = 40, n: int = 2000, epsilons=(0.0, 1.0, 2.0, 5.0, 10.0, 20.0),
                                    seed: int = 0) -> ExperimentReport:
    """Fraction of standard Gaussian draws inside the typicality band, per epsilon."""
    epsilons = [float(e) for e in epsilons]
    if any(e < 0 for e in epsilons):
        raise DomainError("epsilons must be non-negative")
    model = GaussianModel.standard(D)
    X = substream(seed, "coverage").standard_normal((n, D))
    log2_p = log2_density(X, model)
    coverage, r_min, r_max = [], [], []
    for eps in epsilons:
        coverage.append(float(np.mean(typicality_band(model, eps).contains(log2_p))))
        lo, hi = annulus_bounds(D, 1.0, eps)
        r_min.append(lo)
        r_max.append(hi)
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    return ExperimentReport(
        name="typical_set_coverage",
        params={"D": D, "n": n, "epsilons": epsilons, "seed": seed},
        series={
            "coverage": {"epsilon": np.array(epsilons), "coverage": np.array(coverage),
                         "r_min": np.array(r_min), "r_max": np.array(r_max)},
            "norms": {"index": np.arange(n), "norm": norms},
        },
        summary={"entropy_bits": model.entropy_bits, "mean_norm": float(norms.mean())},
    )


def band_for_probability(p: float) -> float:
    """Half-width (in SD) of the central interval holding probability ``p`` of N(0, 1)."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    return float(stats.norm.ppf(0.5 * (1.0 + p)))


def within_band_of_mean_experiment(D: int = 10, n: int = 4063, band: float = 0.3,
                                   seed: int = 0) -> ExperimentReport:
    """How many draws have every coordinate within ``band`` SD of the mean.

    ``band`` is a half-width in standard deviations and must lie in (0, 1).
    The joint fraction is compared against the independence prediction
    ``p ** D`` with ``p = P(|Z| <= band)``.
    """
    if not 0 < band < 1:
        raise DomainError(f"band must lie in (0, 1), got {band}")
    X = substream(seed, "within_band").standard_normal((n, D))
    inside = np.abs(X) <= band
    per_coord = inside.mean(axis=0)
    joint = inside.all(axis=1)
    p = 2.0 * stats.norm.cdf(band) - 1.0
    return ExperimentReport(
        name="within_band_of_mean",
        params={"D": D, "n": n, "band": band, "seed": seed},
        series={"per_coordinate": {"dim": np.arange(D), "fraction": per_coord}},
        summary={
            "per_coordinate_probability": float(p),
            "mean_per_coordinate_fraction": float(per_coord.mean()),
            "min_per_coordinate_fraction": float(per_coord.min()),
            "joint_fraction": float(joint.mean()),
            "joint_count": int(joint.sum()),
            "expected_joint_fraction": float(p ** D),
            "expected_joint_count": float(n * p ** D),
        },
    )


def _derived_seed(seed, name):
    return int(substream(seed, name).integers(2**31))


def _comparison_series(verdicts):
    return {
        "mahalanobis_sd": np.array([v.mahalanobis_sd for v in verdicts]),
        "log2_density": np.array([v.log2_density for v in verdicts]),
        "is_mahalanobis_outlier": np.array([v.is_mahalanobis_outlier for v in verdicts]),
        "is_typicality_outlier": np.array([v.is_typicality_outlier for v in verdicts]),
        "category": [v.category.value for v in verdicts],
    }


def _model_summary(model):
    return {
        "estimator": model.estimator.value,
        "mean": model.mean,
        "covariance": model.covariance,
        "entropy_bits": model.entropy_bits,
        "consistency_factor": model.provenance.get("consistency_factor"),
    }


def planted_outlier_experiment_2d(seed: int = 0, c: float = DEFAULT_C, epsilon: float = DEFAULT_EPSILON,
                                  n_starts: int = 500) -> ExperimentReport:
    """Bivariate cloud plus a vertical line of equally spaced planted points.

    125 inliers come from N(0, [[1, .5], [.5, 1]]); 17 points sit at x = 0
    with y = -4, -3.5, ..., 4.  MCD is fitted on the combined data and both
    rules are applied with the given thresholds.
    """
    inliers = sample_gaussian(PLANTED_2D_N_INLIERS, 2, covariance=PLANTED_2D_COVARIANCE,
                              rng=substream(seed, "planted_2d/inliers")).values
    y = np.linspace(-PLANTED_2D_Y_LIMIT, PLANTED_2D_Y_LIMIT, PLANTED_2D_N_LINE)
    line = np.column_stack([np.full_like(y, PLANTED_2D_LINE_X), y])
    X = np.vstack([inliers, line])
    planted = np.r_[np.zeros(len(inliers), bool), np.ones(len(line), bool)]
    mcd_seed = _derived_seed(seed, "planted_2d/mcd")
    model = fit_gaussian(X, "mcd", seed=mcd_seed, n_starts=n_starts)
    verdicts, counts = compare_methods(X, model, c, epsilon)
    cols = _comparison_series(verdicts)
    maha = cols["is_mahalanobis_outlier"]
    typ = cols["is_typicality_outlier"]
    return ExperimentReport(
        name="planted_2d",
        params={
            "seed": seed, "c": c, "epsilon": epsilon, "n_starts": n_starts, "mcd_seed": mcd_seed,
            "n_inliers": PLANTED_2D_N_INLIERS, "inlier_covariance": PLANTED_2D_COVARIANCE,
            "n_planted": PLANTED_2D_N_LINE, "planted_x": PLANTED_2D_LINE_X,
            "planted_y_range": [-PLANTED_2D_Y_LIMIT, PLANTED_2D_Y_LIMIT],
        },
        series={"points": {"index": np.arange(len(X)), "x": X[:, 0], "y": X[:, 1],
                           "is_planted": planted, **cols}},
        summary={
            "counts": counts,
            "planted_flagged_mahalanobis": int(maha[planted].sum()),
            "planted_flagged_typicality": int(typ[planted].sum()),
            "model": _model_summary(model),
        },
    )


def planted_outlier_experiment_highdim(seed: int = 0, c: float = DEFAULT_C,
                                       epsilon: float = DEFAULT_EPSILON,
                                       n_starts: int = 500) -> ExperimentReport:
    """1400 draws from N(0, I_20) with 15 replaced by points near the mean.

    Planted points are uniform in the ball of radius 0.5 around the origin.
    The summary reports each rule's recall on those 15 points.
    """
    rng = substream(seed, "planted_highdim/data")
    X = rng.standard_normal((HIGHDIM_N, HIGHDIM_D))
    idx = np.sort(rng.choice(HIGHDIM_N, HIGHDIM_N_PLANTED, replace=False))
    direction = rng.standard_normal((HIGHDIM_N_PLANTED, HIGHDIM_D))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = HIGHDIM_PLANT_RADIUS * rng.random(HIGHDIM_N_PLANTED) ** (1.0 / HIGHDIM_D)
    X[idx] = direction * radius[:, None]
    planted = np.zeros(HIGHDIM_N, bool)
    planted[idx] = True

    mcd_seed = _derived_seed(seed, "planted_highdim/mcd")
    model = fit_gaussian(X, "mcd", seed=mcd_seed, n_starts=n_starts)
    verdicts, counts = compare_methods(X, model, c, epsilon)
    cols = _comparison_series(verdicts)
    maha = cols["is_mahalanobis_outlier"]
    typ = cols["is_typicality_outlier"]
    norms = np.linalg.norm(X, axis=1)
    far = norms > np.quantile(norms[~planted], 0.99)
    return ExperimentReport(
        name="planted_highdim",
        params={
            "seed": seed, "c": c, "epsilon": epsilon, "n_starts": n_starts, "mcd_seed": mcd_seed,
            "n": HIGHDIM_N, "D": HIGHDIM_D, "n_planted": HIGHDIM_N_PLANTED,
            "plant_radius": HIGHDIM_PLANT_RADIUS, "plant_scheme": "uniform in ball",
        },
        series={"points": {"index": np.arange(HIGHDIM_N), "norm": norms,
                           "is_planted": planted, **cols}},
        summary={
            "counts": counts,
            "planted_indices": idx,
            "typicality_recall": float(typ[planted].mean()),
            "mahalanobis_recall": float(maha[planted].mean()),
            "far_tail_flagged_both": int((far & maha & typ).sum()),
            "model": _model_summary(model),
        },
    )


EXPERIMENTS = {
    "norm-growth": norm_growth_experiment,
    "radii": radii_distribution_experiment,
    "coverage": typical_set_coverage_experiment,
    "within-band": within_band_of_mean_experiment,
    "planted-2d": planted_outlier_experiment_2d,
    "planted-highdim": planted_outlier_experiment_highdim,
}
