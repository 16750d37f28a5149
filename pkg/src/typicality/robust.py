"""Sample and robust (FAST-MCD) location/scatter estimation.

FAST-MCD draws random elemental (D+1)-subsets, grows each to an h-subset,
and refines the most promising ones with concentration steps (C-steps)
that never increase the covariance determinant.  Start ``k`` draws its
subset from the substream ``SeedSequence([seed, k])`` so results do not
depend on the order in which starts are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import chi2

from .datamatrix import as_array
from .errors import DomainError, SingularCovarianceError
from .gaussian import cholesky_lower, regularized_cholesky, sample_moments

__all__ = ["CStepResult", "McdResult", "c_step", "default_h", "fast_mcd", "sample_moments"]

DEFAULT_N_STARTS = 500
N_REFINED = 10
MAX_C_STEPS = 100
CONVERGENCE_TOL = 1e-12


def default_h(n: int, dim: int) -> int:
    """Subset size with maximal breakdown point, floor((n + D + 1) / 2)."""
    return (n + dim + 1) // 2


@dataclass
class CStepResult:
    mean: np.ndarray
    covariance: np.ndarray
    support: np.ndarray
    log_det: float
    regularized: bool = False

    def __iter__(self):
        # unpacks as (mean, covariance, support)
        return iter((self.mean, self.covariance, self.support))


@dataclass
class McdResult:
    """Outcome of :func:`fast_mcd`.

    ``covariance`` is consistency-corrected; ``raw_covariance`` is the plain
    (h-1)-denominator covariance of the supporting subset whose natural
    log-determinant is ``raw_determinant_log``.  ``log_det_path`` lists the
    log-determinants visited by the winning chain, one per C-step, and
    ``chain_paths`` maps every start index to its own path.
    """

    mean: np.ndarray
    covariance: np.ndarray
    raw_covariance: np.ndarray
    support: np.ndarray
    raw_determinant_log: float
    n_c_steps: int
    seed: int
    n_starts: int
    consistency_factor: float
    best_start: int
    regularized: int = 0
    log_det_path: list[float] = field(default_factory=list)
    chain_paths: dict[int, list[float]] = field(default_factory=dict)


def _squared_distances(X, mean, factor):
    z = solve_triangular(factor, (X - mean).T, lower=True, check_finite=False)
    return np.einsum("ij,ij->j", z, z)


def _moments(sub):
    mean = sub.mean(axis=0)
    centred = sub - mean
    cov = centred.T @ centred / (sub.shape[0] - 1)
    return mean, 0.5 * (cov + cov.T)


def _subset_step(X, subset_idx):
    n = X.shape[0]
    mean, cov = _moments(X[subset_idx])
    try:
        _, factor, delta = regularized_cholesky(cov)
    except SingularCovarianceError:
        return None
    support = np.zeros(n, dtype=bool)
    support[subset_idx] = True
    if delta > 0:
        cov = cov + delta * np.eye(cov.shape[0])
    log_det = 2.0 * float(np.sum(np.log(np.diag(factor))))
    return CStepResult(mean, cov, support, log_det, regularized=delta > 0), factor


def _c_step(X, mean, factor, h):
    d2 = _squared_distances(X, mean, factor)
    keep = np.sort(np.argsort(d2, kind="stable")[:h])
    return _subset_step(X, keep)


def c_step(data, mean, covariance, h: int | None = None) -> CStepResult:
    """One concentration step.

    Ranks all points by Mahalanobis distance under ``(mean, covariance)``,
    keeps the ``h`` closest (ties broken by index) and re-estimates the
    moments from that subset.  The returned log-determinant is never larger
    than that of the input covariance when both come from h-subsets.
    A singular subset covariance is ridged once and flagged via
    ``regularized``; if even that fails ``SingularCovarianceError`` is raised.
    """
    X = as_array(data)
    n, dim = X.shape
    h = default_h(n, dim) if h is None else int(h)
    if not dim + 1 <= h <= n:
        raise DomainError(f"h must lie in [{dim + 1}, {n}], got {h}")
    factor = cholesky_lower(np.atleast_2d(covariance))
    out = _c_step(X, np.asarray(mean, dtype=float), factor, h)
    if out is None:
        raise SingularCovarianceError(0, "selected subset has a singular covariance")
    return out[0]


def _elemental_start(X, rng):
    """Moments of a random (D+1)-subset, grown one point at a time while singular."""
    n, dim = X.shape
    perm = rng.permutation(n)
    size = dim + 1
    while size <= n:
        idx = perm[:size]
        mean, cov = _moments(X[idx])
        try:
            return mean, cholesky_lower(cov)
        except SingularCovarianceError:
            size += 1
    return None


def _iterate(X, state, factor, h, max_steps, path):
    steps = 0
    regularized = 0
    while steps < max_steps:
        out = _c_step(X, state.mean, factor, h)
        if out is None:
            break
        new, new_factor = out
        steps += 1
        regularized += int(new.regularized)
        path.append(new.log_det)
        converged = np.array_equal(new.support, state.support) or \
            abs(new.log_det - state.log_det) < CONVERGENCE_TOL
        state, factor = new, new_factor
        if converged:
            break
    return state, factor, steps, regularized


def fast_mcd(data, h: int | None = None, n_starts: int = DEFAULT_N_STARTS, seed: int = 0,
             n_refined: int = N_REFINED, max_steps: int = MAX_C_STEPS) -> McdResult:
    """Minimum Covariance Determinant estimate by the FAST-MCD search.

    Parameters
    ----------
    data : array_like or DataMatrix, shape (n, D)
    h : int, optional
        Subset size, ``D + 1 <= h <= n``.  Defaults to ``(n + D + 1) // 2``.
    n_starts : int
        Number of random elemental starts; each gets two C-steps after
        being grown to ``h`` points.
    seed : int
        Master seed; start ``k`` uses substream ``(seed, k)``.
    n_refined : int
        How many of the best starts are iterated to convergence.

    Returns
    -------
    McdResult
        The covariance is multiplied by ``median(d^2) / chi2_D.ppf(0.5)``
        so it is consistent for uncontaminated Gaussian data.
    """
    X = as_array(data)
    n, dim = X.shape
    h = default_h(n, dim) if h is None else int(h)
    if not dim + 1 <= h <= n:
        raise DomainError(f"h must lie in [{dim + 1}, {n}], got {h}")
    if n_starts < 1:
        raise DomainError(f"n_starts must be >= 1, got {n_starts}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")

    candidates = []
    for k in range(n_starts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        start = _elemental_start(X, rng)
        if start is None:
            continue
        mean, factor = start
        out = _c_step(X, mean, factor, h)
        if out is None:
            continue
        state, factor = out
        path = [state.log_det]
        first_reg = int(state.regularized)
        state, factor, _, reg = _iterate(X, state, factor, h, 2, path)
        candidates.append((state.log_det, k, state, factor, path, first_reg + reg))

    if not candidates:
        raise SingularCovarianceError(0, "every MCD start was degenerate; data appear rank-deficient")

    chain_paths = {c[1]: c[4] for c in candidates}
    candidates.sort(key=lambda c: (c[0], c[1]))
    refined = []
    for log_det, k, state, factor, path, reg in candidates[:n_refined]:
        path = list(path)
        state, factor, steps, more_reg = _iterate(X, state, factor, h, max_steps, path)
        chain_paths[k] = path
        refined.append((state.log_det, k, state, factor, path, reg + more_reg))
    refined.sort(key=lambda c: (c[0], c[1]))
    log_det, best_k, best, factor, path, reg = refined[0]

    d2 = _squared_distances(X, best.mean, factor)
    correction = float(np.median(d2) / chi2.ppf(0.5, dim))
    return McdResult(
        mean=best.mean,
        covariance=best.covariance * correction,
        raw_covariance=best.covariance,
        support=best.support,
        raw_determinant_log=log_det,
        n_c_steps=len(path) - 1,
        seed=int(seed),
        n_starts=int(n_starts),
        consistency_factor=correction,
        best_start=int(best_k),
        regularized=int(reg),
        log_det_path=path,
        chain_paths=chain_paths,
    )
