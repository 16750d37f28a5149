"""Where do standard Gaussian draws live as the dimension grows?

Run with ``python demos/01_norm_concentration.py``.
"""
import math

from typicality.simulation import (band_for_probability, norm_growth_experiment,
                                   radii_distribution_experiment, within_band_of_mean_experiment)

# Expected norm grows like sqrt(D): 200 draws per dimension, 1-99% band.
report = norm_growth_experiment(D_max=100, n_per_D=200, seed=0)
t = report.series["by_dim"]
print(" D   mean norm   sqrt(D)   chi mean    1%     99%")
for D in (1, 2, 5, 10, 20, 40, 100):
    i = D - 1
    print(f"{D:3d}  {t['mean_norm'][i]:8.3f}  {t['sqrt_D'][i]:8.3f}  {t['chi_mean'][i]:8.3f}"
          f"  {t['p01'][i]:6.2f}  {t['p99'][i]:6.2f}")

# In 100 dimensions almost every radius is between 8 and 12.
s = radii_distribution_experiment(D=100, n=100_000, seed=0).summary
print(f"\n100-D radii: {s['frac_within_1']:.1%} in [9, 11], {s['frac_within_2']:.2%} in [8, 12], "
      f"{s['frac_below_minus_2']:.2%} below 8")

# Squared norms are chi-square distributed.
s = radii_distribution_experiment(D=40, n=10_000, seed=0).summary
print(f"40-D squared norms: mean {s['mean_sq_norm']:.2f} (chi2 mean 40), variance {s['var_sq_norm']:.1f} "
      f"(chi2 variance 80), KS p-value {s['ks_pvalue']:.3f}")

# Nobody is average in ten dimensions at once.
band = band_for_probability(0.3)
s = within_band_of_mean_experiment(D=10, n=4063, band=band, seed=0).summary
print(f"\nCentral 30% per trait (|z| <= {band:.3f}): {s['mean_per_coordinate_fraction']:.1%} of people per "
      f"trait, {s['joint_count']} of 4063 on all ten (independence predicts {s['expected_joint_count']:.3f})")
