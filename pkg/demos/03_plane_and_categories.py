"""
The productivity-prestige plane
===============================

Every career year is a point (P, I). Values above 3.5 mark an outlier year in that
dimension and the signs split the rest into quadrants, giving seven sectors. A
researcher's category follows from the sectors their career visits.
"""

import numpy as np

from prodprestige.plane import (Sector, categorize_researcher, classify_sectors, occupation_profile,
                                sector_entropy)

# %%
# Seven points, one per sector.
P = np.array([5.0, 1.0, 4.2, 0.5, -0.5, 0.5, -2.0])
I = np.array([4.0, 3.9, -1.0, 0.5, 0.5, -0.5, -2.0])
for p, i, s in zip(P, I, classify_sectors(I, P)):
    print(f"P = {p:+.1f}, I = {i:+.1f} -> {Sector(s).name}")

# %%
# Categories. One perfectionist year (Ipp) is enough to make a perfectionist.
careers = {
    "steady": [Sector.IpPp, Sector.ImPm, Sector.IpPm],
    "one good year": [Sector.ImPp, Sector.Ipp, Sector.IpPp],
    "both, different years": [Sector.Ipp, Sector.Ppp],
    "both in one year": [Sector.IPpp, Sector.ImPm],
}
for name, sec in careers.items():
    print(f"{name:>22}: {categorize_researcher(sec).label}")

# %%
# Occupation entropy over the four non-outlier quadrants measures how evenly a
# career is spread across them: 0 for one quadrant only, 1 for a uniform spread.
quadrants = [Sector.IpPp, Sector.IpPm, Sector.ImPp, Sector.ImPm]
for sec in ([Sector.IpPp] * 4, [Sector.IpPp, Sector.IpPp, Sector.IpPm, Sector.ImPp], quadrants):
    h = sector_entropy(occupation_profile(sec), quadrants)
    print([s.name for s in sec], f"entropy {h:.3f}")
