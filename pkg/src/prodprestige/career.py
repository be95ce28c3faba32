"""Career-age aggregation: sliding-window trends, sector occupancy by career interval,
and the two logistic models of being a perfectionist.

Career age ``A`` is ``year - phd_year``; only years with ``A >= 1`` enter the age
analyses here.
"""

import numpy as np
import pandas as pd

from .plane import SECTORS, Sector
from .rng import substream
from .stats import bootstrap_ci, fit_logistic

ALIGNMENTS = ("centered", "trailing")
TREND_COLUMNS = ["discipline", "age", "meanP", "loP", "hiP", "meanI", "loI", "hiI", "n"]


def window_bounds(age, window=5, alignment="centered"):
    """Inclusive career-age range ``(lo, hi)`` of the window labelled ``age``.

    Examples
    --------
    >>> window_bounds(10)
    (8, 12)
    >>> window_bounds(10, alignment="trailing")
    (6, 10)
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if alignment == "centered":
        lo = age - (window - 1) // 2
        return lo, lo + window - 1
    if alignment == "trailing":
        return age - window + 1, age
    raise ValueError(f"alignment must be one of {ALIGNMENTS}")


def sliding_window_trends(career_years, window=5, alignment="centered", n_resamples=10_000,
                          level=0.95, min_n=1, seed=0):
    """Mean P and I with bootstrap intervals in sliding career-age windows.

    For every integer age ``a`` between 1 and the largest observed age, the window
    pools all researcher-years whose age falls in ``window_bounds(a)``. Windows are
    truncated at the career edges (ages below 1 simply do not exist), so the first
    centered window averages ages 1 to 3 only.

    Parameters
    ----------
    career_years : DataFrame
        Needs ``discipline``, ``A``, ``P`` and ``I``.
    min_n : int
        Windows with fewer researcher-years are omitted.
    seed : int
        Each (discipline, age, quantity) bootstrap has its own substream.

    Returns
    -------
    DataFrame
        Columns ``discipline, age, meanP, loP, hiP, meanI, loI, hiI, n``.
    """
    cy = career_years[career_years["A"] >= 1]
    rows = []
    for disc, g in cy.groupby("discipline", sort=True):
        ages = g["A"].to_numpy()
        P = g["P"].to_numpy(dtype=float)
        I = g["I"].to_numpy(dtype=float)
        for a in range(1, int(ages.max()) + 1):
            lo, hi = window_bounds(a, window, alignment)
            sel = (ages >= lo) & (ages <= hi)
            n = int(sel.sum())
            if n == 0 or n < min_n:
                continue
            row = {"discipline": disc, "age": a, "n": n}
            for name, x in (("P", P[sel]), ("I", I[sel])):
                ci = bootstrap_ci(x, n_resamples, level, rng=substream(seed, "trend", disc, a, name))
                row[f"mean{name}"] = float(x.mean())
                row[f"lo{name}"], row[f"hi{name}"] = ci
            rows.append(row)
    return pd.DataFrame(rows, columns=TREND_COLUMNS)


def career_interval(age, interval=5):
    """Zero-based interval index: ages 1-5 map to 0, 6-10 to 1, and so on."""
    return (np.asarray(age) - 1) // interval


def occupancy_matrix(career_years, interval=5, min_researchers=20, omit=(Sector.IPpp,)):
    """Mean sector occupancy per career interval, one matrix per discipline.

    Each researcher's years in interval ``m`` (ages ``interval*m + 1`` to
    ``interval*(m + 1)``) give that researcher's sector fractions; a column is the
    mean of those fractions over researchers with at least one year in the interval.
    Columns with fewer than ``min_researchers`` contributors are dropped, then the
    rows in ``omit`` are removed.

    Returns
    -------
    dict
        discipline -> DataFrame with sector names as index, interval labels such as
        ``"1-5"`` as columns, and the contributor counts in ``.attrs["n_researchers"]``.
    """
    cy = career_years[career_years["A"] >= 1]
    names = [s.name for s in SECTORS]
    keep = [s.name for s in SECTORS if s not in set(omit)]
    out = {}
    for disc, g in cy.groupby("discipline", sort=True):
        m = career_interval(g["A"].to_numpy(), interval)
        onehot = np.eye(len(SECTORS))[g["sector"].to_numpy(dtype=np.int64)]
        frame = pd.DataFrame(onehot, columns=names)
        frame["researcher_id"] = g["researcher_id"].to_numpy()
        frame["interval"] = m
        per_researcher = frame.groupby(["interval", "researcher_id"]).mean()
        counts = per_researcher.groupby(level="interval").size()
        means = per_researcher.groupby(level="interval").mean()
        cols = counts.index[counts >= min_researchers]
        mat = means.loc[cols, keep].T
        mat.columns = [f"{interval * c + 1}-{interval * (c + 1)}" for c in cols]
        mat.attrs["n_researchers"] = {label: int(counts[c]) for label, c in zip(mat.columns, cols)}
        out[disc] = mat
    return out


def occupancy_frame(matrices):
    """Long table (discipline, sector, interval, fraction, n_researchers) for export."""
    rows = []
    for disc, mat in matrices.items():
        for label in mat.columns:
            for sector in mat.index:
                rows.append({"discipline": disc, "sector": sector, "interval": label,
                             "fraction": float(mat.loc[sector, label]),
                             "n_researchers": mat.attrs["n_researchers"][label]})
    return pd.DataFrame(rows, columns=["discipline", "sector", "interval", "fraction", "n_researchers"])


def _outliers(categories, discipline=None):
    out = categories[~categories["non_outlier"]]
    if discipline is not None:
        out = out[out["discipline"] == discipline]
    return out


def perfectionist_vs_length(categories, discipline=None):
    """Logistic fit of being a perfectionist on career length, over outlier researchers."""
    out = _outliers(categories, discipline)
    if len(out) < 2:
        raise ValueError("need at least two outlier researchers")
    return fit_logistic(out["career_length"].to_numpy(), out["perfectionist"].to_numpy())


def perfectionist_vs_hyperprolific_years(categories, discipline=None):
    """Logistic fit of being a perfectionist on the number of hyperprolific (Ppp) years,
    over outlier researchers."""
    out = _outliers(categories, discipline)
    if len(out) < 2:
        raise ValueError("need at least two outlier researchers")
    return fit_logistic(out["n_hyperprolific_years"].to_numpy(), out["perfectionist"].to_numpy())


def logistic_table(categories, by_discipline=True):
    """Both perfectionist models for all outliers and (optionally) per discipline.

    Disciplines where a fit is impossible (one outcome class, too few outliers) get a
    row with the error message in ``diagnostic`` instead of coefficients.
    """
    groups = [None]
    if by_discipline:
        groups += sorted(categories["discipline"].unique())
    rows = []
    for disc in groups:
        for model, fn in (("hyperprolific_years", perfectionist_vs_hyperprolific_years),
                          ("career_length", perfectionist_vs_length)):
            row = {"discipline": disc or "all", "model": model}
            try:
                row.update(fn(categories, disc).to_dict())
            except ValueError as exc:
                row["diagnostic"] = str(exc)
                row["converged"] = False
            rows.append(row)
    return pd.DataFrame(rows)
