"""Standard scores for productivity and journal prestige.

Productivity ``p`` is scored against all researchers of the same discipline and year.
Prestige ``i`` (the mean journal metric of a researcher-year) is scored against the
distribution of the mean of ``p`` articles drawn at random from that discipline-year,
which removes the shrinking spread of a mean over more articles.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import hashlib
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .robust import LocationScale, location_scale
from .rng import substream

log = logging.getLogger(__name__)


class DegenerateScaleError(ValueError):
    """Raised when a standard score would divide by a zero scale."""


def productivity_zscore(p, norm):
    if not norm.scale > 0:
        raise DegenerateScaleError("productivity cell has zero scale")
    z = (np.asarray(p, dtype=float) - norm.location) / norm.scale
    return float(z) if z.ndim == 0 else z


def prestige_zscore(i, null):
    loc, scale = null
    if not scale > 0:
        raise DegenerateScaleError("prestige null has zero scale")
    z = (np.asarray(i, dtype=float) - loc) / scale
    return float(z) if z.ndim == 0 else z


def sample_null_means(pool, p, n_realizations, rng, replace=True):
    """Means of ``p`` metrics drawn from ``pool``, one per realization."""
    pool = np.asarray(pool, dtype=float)
    if pool.size == 0:
        raise ValueError("empty article pool")
    if p < 1 or n_realizations < 2:
        raise ValueError("need p >= 1 and n_realizations >= 2")
    if replace:
        idx = rng.integers(0, pool.size, size=(n_realizations, p))
        return pool[idx].mean(axis=1)
    if p > pool.size:
        raise ValueError(f"cannot draw {p} articles without replacement from a pool of {pool.size}")
    return np.array([pool[rng.choice(pool.size, p, replace=False)].mean()
                     for _ in range(n_realizations)])


def prestige_null(pool, p, n_realizations, rng, replace=True, estimator="huber"):
    """Location and scale of the mean metric of ``p`` random articles from ``pool``.

    Returns
    -------
    (null_location, null_scale) : tuple of float
    """
    pool = np.asarray(pool, dtype=float)
    if pool.size == 0:
        raise ValueError("empty article pool")
    if np.all(pool == pool[0]):
        return float(pool[0]), 0.0
    means = sample_null_means(pool, p, n_realizations, rng, replace)
    est = location_scale(means, estimator)
    return est.location, est.scale


@dataclass
class NormalizationResult:
    career_years: pd.DataFrame
    productivity_table: dict
    null_table: dict
    n_realizations: int
    report: dict = field(default_factory=dict)


def article_pools(articles):
    """Sorted metric arrays of all matched articles, keyed by (discipline, year).

    Sorting makes the pools independent of input row order.
    """
    matched = articles[articles["metric"].notna()]
    return {(d, int(y)): np.sort(g.to_numpy(dtype=float))
            for (d, y), g in matched.groupby(["discipline", "year"])["metric"]}


def null_table_key(pools, triples, seed, n_realizations, replace, estimator):
    h = hashlib.sha256()
    for key in sorted(pools):
        h.update(repr(key).encode())
        h.update(np.ascontiguousarray(pools[key]).tobytes())
    h.update(repr(sorted(triples)).encode())
    h.update(repr((int(seed), int(n_realizations), bool(replace), estimator)).encode())
    return h.hexdigest()


def save_null_table(path, table, key):
    rows = [[d, y, p, loc, scale] for (d, y, p), (loc, scale) in sorted(table.items())]
    Path(path).write_text(json.dumps({"key": key, "entries": rows}), encoding="utf-8")


def load_null_table(path, key):
    """Cached null table, or None when the file is absent or was built for other inputs."""
    path = Path(path)
    if not path.is_file():
        return None
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("key") != key:
        return None
    return {(d, int(y), int(p)): (float(loc), float(scale)) for d, y, p, loc, scale in doc["entries"]}


def normalize_corpus(career_years, articles, n_realizations=1000, seed=0, replace=True,
                     estimator="huber", threads=1, cache_path=None):
    """Add P and I to every non-degenerate career year.

    Parameters
    ----------
    career_years : DataFrame
        Output of :func:`prodprestige.corpus.build_career_years` (filtered).
    articles : DataFrame
        Annotated articles (``metric`` column); the matched ones form the sampling pools.
    n_realizations : int
        Random draws per (discipline, year, p) null.
    seed : int
        Master seed; each (discipline, year, p) triple gets its own substream.
    replace : bool
        Draw null samples with replacement.
    estimator : {"huber", "moments"}
        Location/scale estimator used for both scores.
    threads : int
        Worker threads for null construction; output does not depend on it.
    cache_path : path, optional
        JSON cache of the null table, reused when inputs and settings match.
    """
    cy = career_years.sort_values(["discipline", "researcher_id", "year"]).reset_index(drop=True)
    pools = article_pools(articles)

    prod_table = {}
    degenerate_cells = []
    for (disc, year), g in cy.groupby(["discipline", "year"]):
        key = (disc, int(year))
        if g["researcher_id"].nunique() < 2:
            degenerate_cells.append(key)
            continue
        est = location_scale(g["p"].to_numpy(dtype=float), estimator)
        prod_table[key] = est
        if not est.scale > 0:
            degenerate_cells.append(key)

    cell_ok = np.array([(d, int(y)) in prod_table and prod_table[(d, int(y))].scale > 0
                        for d, y in zip(cy["discipline"], cy["year"])], dtype=bool)
    triples = sorted({(d, int(y), int(p)) for d, y, p in
                      zip(cy.loc[cell_ok, "discipline"], cy.loc[cell_ok, "year"], cy.loc[cell_ok, "p"])})

    null_table = None
    key = None
    if cache_path is not None:
        key = null_table_key(pools, triples, seed, n_realizations, replace, estimator)
        null_table = load_null_table(cache_path, key)
    if null_table is None:
        def build(triple):
            d, y, p = triple
            return prestige_null(pools[(d, y)], p, n_realizations, substream(seed, "null", d, y, p),
                                 replace=replace, estimator=estimator)
        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(build, triples))
        else:
            values = [build(t) for t in triples]
        null_table = dict(zip(triples, values))
        if cache_path is not None:
            save_null_table(cache_path, null_table, key)

    P = np.full(len(cy), np.nan)
    I = np.full(len(cy), np.nan)
    n_degenerate_null = 0
    for idx in np.flatnonzero(cell_ok):
        d, y, p, i = cy.at[idx, "discipline"], int(cy.at[idx, "year"]), int(cy.at[idx, "p"]), cy.at[idx, "i"]
        P[idx] = productivity_zscore(p, prod_table[(d, y)])
        loc, scale = null_table[(d, y, p)]
        if scale > 0:
            I[idx] = (i - loc) / scale
        else:
            n_degenerate_null += 1

    keep = np.isfinite(P) & np.isfinite(I)
    out = cy.assign(P=P, I=I).loc[keep].reset_index(drop=True)
    report = {
        "n_input": int(len(cy)),
        "n_output": int(keep.sum()),
        "degenerate_cells": [list(k) for k in degenerate_cells],
        "n_excluded_degenerate_cell": int((~cell_ok).sum()),
        "n_excluded_degenerate_null": n_degenerate_null,
        "n_null_triples": len(null_table),
    }
    if degenerate_cells or n_degenerate_null:
        log.info("normalization excluded %d career years in degenerate cells and %d with zero-scale nulls",
                 report["n_excluded_degenerate_cell"], n_degenerate_null)
    return NormalizationResult(out, prod_table, null_table, n_realizations, report)


def robust_spread(values):
    """Huber scale, used to measure the spread of standard scores."""
    return location_scale(values, "huber").scale

