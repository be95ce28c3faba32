"""Sectors of the journal-prestige (I) versus productivity (P) plane.

Outlier sectors open strictly above the threshold ``tau``; the sign half-planes are
closed at zero (``I >= 0`` counts as above average).
"""

from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
import math

import numpy as np
import pandas as pd

TAU = 3.5
EXTREME_P = 27.7


class Sector(IntEnum):
    IPpp = 0   # I > tau and P > tau
    Ipp = 1    # I > tau, P <= tau
    Ppp = 2    # P > tau, I <= tau
    IpPp = 3   # 0 <= I <= tau, 0 <= P <= tau
    IpPm = 4   # 0 <= I <= tau, P < 0
    ImPp = 5   # I < 0, 0 <= P <= tau
    ImPm = 6   # I < 0, P < 0

    @property
    def label(self):
        return SECTOR_LABELS[self]

    @property
    def is_outlier(self):
        return self <= Sector.Ppp


SECTORS = tuple(Sector)
SECTOR_LABELS = {
    Sector.IPpp: "I+P+*", Sector.Ipp: "I+*", Sector.Ppp: "P+*",
    Sector.IpPp: "I+P+", Sector.IpPm: "I+P-", Sector.ImPp: "I-P+", Sector.ImPm: "I-P-",
}
OUTLIER_SECTORS = (Sector.IPpp, Sector.Ipp, Sector.Ppp)
NON_OUTLIER_SECTORS = (Sector.IpPp, Sector.IpPm, Sector.ImPp, Sector.ImPm)


def classify_sector(I, P, tau=TAU):
    if not (math.isfinite(I) and math.isfinite(P)):
        raise ValueError("I and P must be finite")
    if I > tau:
        return Sector.IPpp if P > tau else Sector.Ipp
    if P > tau:
        return Sector.Ppp
    if I >= 0:
        return Sector.IpPp if P >= 0 else Sector.IpPm
    return Sector.ImPp if P >= 0 else Sector.ImPm


def classify_sectors(I, P, tau=TAU):
    """Vectorized :func:`classify_sector`; returns integer sector codes."""
    I = np.asarray(I, dtype=float)
    P = np.asarray(P, dtype=float)
    if not (np.all(np.isfinite(I)) and np.all(np.isfinite(P))):
        raise ValueError("I and P must be finite")
    hi_i, hi_p = I > tau, P > tau
    out = np.where(I >= 0, np.where(P >= 0, Sector.IpPp, Sector.IpPm),
                   np.where(P >= 0, Sector.ImPp, Sector.ImPm))
    out = np.where(hi_p & ~hi_i, Sector.Ppp, out)
    out = np.where(hi_i & ~hi_p, Sector.Ipp, out)
    out = np.where(hi_i & hi_p, Sector.IPpp, out)
    return out.astype(np.int8)


def add_sectors(career_years, tau=TAU):
    return career_years.assign(sector=classify_sectors(career_years["I"], career_years["P"], tau))


@dataclass(frozen=True)
class ResearcherCategory:
    perfectionist: bool
    hyperprolific: bool
    hyperprolific_perfectionist: bool

    @property
    def non_outlier(self):
        return not (self.perfectionist or self.hyperprolific or self.hyperprolific_perfectionist)

    @property
    def exclusively_perfectionist(self):
        return self.perfectionist and not self.hyperprolific

    @property
    def exclusively_hyperprolific(self):
        return self.hyperprolific and not self.perfectionist

    @property
    def both_non_simultaneous(self):
        return self.perfectionist and self.hyperprolific and not self.hyperprolific_perfectionist

    @property
    def label(self):
        if self.non_outlier:
            return "non_outlier"
        if self.exclusively_perfectionist:
            return "exclusively_perfectionist"
        if self.exclusively_hyperprolific:
            return "exclusively_hyperprolific"
        return "both"


def categorize_researcher(sectors):
    """Category flags from the sectors of one researcher's career years.

    A hyperprolific-perfectionist year (IPpp) is an outlier year in both dimensions,
    so it also makes the researcher a perfectionist and a hyperprolific.
    """
    seen = {Sector(s) for s in sectors}
    if not seen:
        raise ValueError("career has no years")
    both = Sector.IPpp in seen
    return ResearcherCategory(
        perfectionist=both or Sector.Ipp in seen,
        hyperprolific=both or Sector.Ppp in seen,
        hyperprolific_perfectionist=both,
    )


def categorize_all(career_years):
    """One row per researcher with category flags, career length bookkeeping and Y_P."""
    rows = []
    for (disc, rid), g in career_years.groupby(["discipline", "researcher_id"], sort=True):
        sec = g["sector"].to_numpy()
        cat = categorize_researcher(sec)
        rows.append({
            "discipline": disc,
            "researcher_id": rid,
            "category": cat.label,
            "perfectionist": cat.perfectionist,
            "hyperprolific": cat.hyperprolific,
            "hyperprolific_perfectionist": cat.hyperprolific_perfectionist,
            "non_outlier": cat.non_outlier,
            "n_years": len(g),
            "n_outlier_years": int(np.isin(sec, OUTLIER_SECTORS).sum()),
            "n_hyperprolific_years": int((sec == Sector.Ppp).sum()),
            "n_perfectionist_years": int((sec == Sector.Ipp).sum()),
            "career_length": int(g["year"].max() - g["phd_year"].iloc[0]),
        })
    return pd.DataFrame(rows)


def venn_counts(categories):
    """Region counts of the four-category diagram plus summary fractions.

    ``categories`` is an iterable of :class:`ResearcherCategory` or the frame from
    :func:`categorize_all`.
    """
    if isinstance(categories, pd.DataFrame):
        cats = [ResearcherCategory(bool(a), bool(b), bool(c)) for a, b, c in zip(
            categories["perfectionist"], categories["hyperprolific"],
            categories["hyperprolific_perfectionist"])]
    else:
        cats = list(categories)
    n = len(cats)
    counts = {
        "researchers": n,
        "non_outlier": sum(c.non_outlier for c in cats),
        "perfectionist": sum(c.perfectionist for c in cats),
        "hyperprolific": sum(c.hyperprolific for c in cats),
        "hyperprolific_perfectionist": sum(c.hyperprolific_perfectionist for c in cats),
        "exclusively_perfectionist": sum(c.exclusively_perfectionist for c in cats),
        "exclusively_hyperprolific": sum(c.exclusively_hyperprolific for c in cats),
        "both_non_simultaneous": sum(c.both_non_simultaneous for c in cats),
    }
    outliers = n - counts["non_outlier"]
    counts["outlier"] = outliers
    counts["both_any"] = sum(c.perfectionist and c.hyperprolific for c in cats)
    exclusive = counts["exclusively_perfectionist"] + counts["exclusively_hyperprolific"]
    counts["fraction_outlier"] = outliers / n if n else float("nan")
    counts["fraction_exclusive_among_outliers"] = exclusive / outliers if outliers else float("nan")
    return counts


def year_summary(career_years):
    """Fractions of outlier career years and of researchers with exactly one outlier year."""
    sec = career_years["sector"].to_numpy()
    is_out = np.isin(sec, OUTLIER_SECTORS)
    per_researcher = pd.Series(is_out).groupby(career_years["researcher_id"].to_numpy()).sum()
    n_out_res = int((per_researcher > 0).sum())
    return {
        "career_years": int(len(sec)),
        "outlier_years": int(is_out.sum()),
        "fraction_outlier_years": float(is_out.mean()) if len(sec) else float("nan"),
        "sector_counts": {Sector(s).name: int((sec == s).sum()) for s in SECTORS},
        "fraction_single_outlier_year": (float((per_researcher == 1).sum() / n_out_res)
                                         if n_out_res else float("nan")),
    }


@dataclass(frozen=True)
class OccupationProfile:
    fractions: dict
    career_length: int


def occupation_profile(sectors):
    sectors = [Sector(s) for s in sectors]
    if not sectors:
        raise ValueError("career has no years")
    counts = Counter(sectors)
    n = len(sectors)
    return OccupationProfile({s: counts.get(s, 0) / n for s in SECTORS}, n)


def sector_entropy(profile, sectors):
    """Normalized Shannon entropy of occupation restricted to ``sectors``.

    Raises ``ValueError`` when the researcher has no year in the subset.
    """
    sectors = [Sector(s) for s in sectors]
    if len(sectors) < 2:
        raise ValueError("entropy needs at least two sectors")
    f = np.array([profile.fractions.get(s, 0.0) for s in sectors])
    total = f.sum()
    if total <= 0:
        raise ValueError("no career year in the requested sectors")
    f = f[f > 0] / total
    return abs(float(-(f * np.log(f)).sum() / math.log(len(sectors))))


def entropy_distribution(career_years, categories, sectors, group="outlier", min_sectors_visited=1):
    """Entropy per researcher of ``group`` (``outlier`` or ``non_outlier``).

    Researchers without a year in ``sectors`` or visiting fewer than
    ``min_sectors_visited`` of them are skipped.
    """
    want_outlier = group == "outlier"
    ids = set(categories.loc[categories["non_outlier"] != want_outlier, "researcher_id"])
    out = []
    for rid, g in career_years[career_years["researcher_id"].isin(ids)].groupby("researcher_id", sort=True):
        sec = g["sector"].to_numpy()
        visited = len(set(sec) & {int(s) for s in sectors})
        if visited < max(1, min_sectors_visited):
            continue
        out.append((rid, sector_entropy(occupation_profile(sec), sectors)))
    return pd.DataFrame(out, columns=["researcher_id", "entropy"])


def extreme_hyperprolific(career_years, threshold=EXTREME_P, tau=TAU):
    """Researcher-years with P above ``threshold`` and their sectors."""
    hit = career_years[career_years["P"] > threshold]
    sectors = [Sector(classify_sector(i, p, tau)).name for i, p in zip(hit["I"], hit["P"])]
    return (hit[["discipline", "researcher_id", "year", "P", "I"]].assign(sector=sectors)
            .reset_index(drop=True))


def plane_export(career_years):
    """Scatter table for plotting: one row per researcher-year."""
    cy = career_years
    return pd.DataFrame({
        "discipline": cy["discipline"], "researcher_id": cy["researcher_id"], "year": cy["year"],
        "I": cy["I"], "P": cy["P"], "sector": [Sector(s).name for s in cy["sector"]],
    })
