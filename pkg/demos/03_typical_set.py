"""Entropy, the AEP and the typical set of an isotropic Gaussian.

Run with ``python demos/03_typical_set.py``.
"""
import numpy as np

from typicality import GaussianModel, empirical_entropy_estimate, log2_density_multivariate
from typicality.gaussian import LOG2E
from typicality.outliers import annulus_bounds
from typicality.simulation import typical_set_coverage_experiment

D = 40
model = GaussianModel.standard(D)
print(f"N(0, I_{D}): entropy H = {model.entropy_bits:.3f} bits")

# The average surprisal of a sample converges to H.
for n in (10, 100, 1000, 10_000):
    X = np.random.default_rng(n).standard_normal((n, D))
    print(f"  n = {n:6d}: -mean log2 p = {empirical_entropy_estimate(X, model):.3f}")

# The mode is the single most likely point but sits (D/2) log2 e bits away from H.
surprisal = -log2_density_multivariate(np.zeros(D), model)
print(f"\nsurprisal at the mean: {surprisal:.3f} bits, i.e. {model.entropy_bits - surprisal:.3f} "
      f"= {D / 2 * LOG2E:.3f} bits below H")

# Each band [H - eps, H + eps] is a shell of radii.
report = typical_set_coverage_experiment(D=D, n=2000, epsilons=[0, 1, 2, 5, 10, 20, 30], seed=0)
c = report.series["coverage"]
print("\n eps   r_min   r_max   fraction of draws inside")
for eps, lo, hi, frac in zip(c["epsilon"], c["r_min"], c["r_max"], c["coverage"]):
    print(f"{eps:4.0f}  {lo:6.2f}  {hi:6.2f}   {frac:.3f}")
print(f"\nthe mean (radius 0) joins the typical set only once eps >= {D / 2 * LOG2E:.2f}; "
      f"annulus at eps = 5: {annulus_bounds(D, 1.0, 5.0)}")
