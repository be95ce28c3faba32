"""
Size-corrected prestige
=======================

A researcher's raw prestige in a year is the mean metric of the journals of their
papers. The spread of that mean shrinks with the number of papers, so raw values
reward small output. The prestige score compares the mean against the distribution of
means of the same number of papers drawn at random from that year's article pool.
"""

import numpy as np

from prodprestige.normalize import prestige_null, prestige_zscore, sample_null_means
from prodprestige.rng import substream

# %%
# A journal-metric pool shaped like real ones: lognormal and skewed.
pool = np.sort(np.random.default_rng(1).lognormal(0.5, 0.5, size=5000))

# %%
# The null location barely moves with p while the null scale falls roughly as 1/sqrt(p).
for p in (1, 2, 5, 10, 50):
    loc, scale = prestige_null(pool, p, 2000, substream(7, "demo", p))
    print(f"p = {p:3d}: null location {loc:.3f}, null scale {scale:.4f}")

# %%
# The same raw mean of 2.4 means very different things for 2 papers and for 40.
for p in (2, 40):
    loc, scale = prestige_null(pool, p, 2000, substream(7, "demo", p))
    print(f"raw mean 2.4 with {p:2d} papers -> I = {prestige_zscore(2.4, (loc, scale)):.2f}")

# %%
# After the correction, researchers who publish at random have a prestige score with
# unit spread whatever their output.
for p in (1, 10, 50):
    loc, scale = prestige_null(pool, p, 4000, substream(7, "demo", p))
    draws = sample_null_means(pool, p, 4000, substream(8, "check", p))
    z = prestige_zscore(draws, (loc, scale))
    print(f"p = {p:2d}: fresh random researchers have I with median {np.median(z):+.3f}")
