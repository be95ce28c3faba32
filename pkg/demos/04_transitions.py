"""
Year-to-year sector transitions
===============================

Do researchers tend to stay in a sector from one year to the next? Observed transition
counts are compared with the counts expected when every career's years are shuffled,
which keeps each researcher's sector mix but destroys the ordering.
"""

import numpy as np

from prodprestige.plane import SECTORS
from prodprestige.synth import generate_sector_careers
from prodprestige.transitions import count_transitions, excess_matrix, observed_counts, shuffle_null

names = [s.name for s in SECTORS]

# %%
# A single career with a gap: by default the pair across the gap is not counted.
years = np.array([2001, 2002, 2003, 2005, 2006])
sectors = np.array([3, 3, 4, 4, 6])
print("pairs counted:", count_transitions(years, sectors).sum(), "of", len(years) - 1)

# %%
# Careers from a sticky chain (stay with probability 0.4) and from an i.i.d. chain.
for persistence in (0.0, 0.4):
    careers = generate_sector_careers(n_researchers=300, n_years=12, persistence=persistence, seed=3)
    obs = observed_counts(careers)
    null = shuffle_null(careers, n_shuffles=500, seed=4)
    ex = excess_matrix(obs, null.mean, null.sd, 500)
    diag = np.diag(ex.excess)
    print(f"persistence {persistence}: diagonal excess", " ".join(f"{d:+.2f}" for d in diag))
