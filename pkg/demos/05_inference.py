"""
Logistic models, permutation tests and bootstrap intervals
==========================================================

The frequentist tools behind the category comparisons and career-age trends.
"""

import numpy as np

from prodprestige import stats
from prodprestige.synth import generate_logistic_data

# %%
# The probability of being a perfectionist as a function of career length, with the
# coefficients reported for the full corpus.
for L in (10, 20, 30):
    print(f"P(perfectionist | L = {L}) = {stats.predict_probability((1.849, -0.051), L):.3f}")

# %%
# Simulate from that model and refit it.
x, y = generate_logistic_data(n=5000, seed=1)
fit = stats.fit_logistic(x, y)
print(f"refit: intercept {fit.intercept:.3f} +- {fit.intercept_se:.3f}, "
      f"slope {fit.slope:.4f} +- {fit.slope_se:.4f}, slope p = {fit.slope_p:.2g}")

# %%
# Permutation test of a difference in means between two groups of researcher-years.
rng = np.random.default_rng(2)
a, b = rng.normal(0.3, 1, 80), rng.normal(0.0, 1, 120)
res = stats.permutation_test(a, b, n_permutations=20_000, rng=3)
print(f"difference {res.statistic:.3f}, permutation p = {res.p_value:.4f}")

# %%
# Percentile bootstrap interval of a mean.
lo, hi = stats.bootstrap_ci(a, 5000, rng=4)
print(f"mean {a.mean():.3f}, 95% bootstrap interval [{lo:.3f}, {hi:.3f}]")
