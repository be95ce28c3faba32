"""Sector transitions between consecutive career years and their shuffle null."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .plane import SECTORS
from .rng import derive_seed, substream

N_SECTORS = len(SECTORS)
GAP_POLICIES = ("break", "bridge")
SHUFFLE_BATCH = 50


def _pair_mask(years, gap_policy):
    years = np.asarray(years)
    if gap_policy == "break":
        return np.diff(years) == 1
    if gap_policy == "bridge":
        return np.ones(max(len(years) - 1, 0), dtype=bool)
    raise ValueError(f"gap_policy must be one of {GAP_POLICIES}")


def count_transitions(years, sectors, gap_policy="break"):
    """7x7 counts of (from, to) sector pairs in one year-sorted career.

    With ``gap_policy="break"`` only records in consecutive calendar years form a pair;
    ``"bridge"`` pairs consecutive records regardless of gaps.
    """
    years = np.asarray(years)
    sectors = np.asarray(sectors, dtype=np.int64)
    if np.any(np.diff(years) <= 0):
        raise ValueError("career must be sorted by strictly increasing year")
    mask = _pair_mask(years, gap_policy)
    codes = sectors[:-1][mask] * N_SECTORS + sectors[1:][mask]
    return np.bincount(codes, minlength=N_SECTORS * N_SECTORS).reshape(N_SECTORS, N_SECTORS)


def careers_from_frame(career_years, researcher_ids=None):
    """List of (years, sector codes) per researcher, sorted by researcher and year."""
    cy = career_years
    if researcher_ids is not None:
        cy = cy[cy["researcher_id"].isin(set(researcher_ids))]
    cy = cy.sort_values(["researcher_id", "year"])
    return [(g["year"].to_numpy(), g["sector"].to_numpy(dtype=np.int64))
            for _, g in cy.groupby("researcher_id", sort=True)]


def observed_counts(careers, gap_policy="break"):
    total = np.zeros((N_SECTORS, N_SECTORS), dtype=np.int64)
    for years, sectors in careers:
        total += count_transitions(years, sectors, gap_policy)
    return total


@dataclass
class ShuffleNull:
    mean: np.ndarray
    sd: np.ndarray
    n_shuffles: int


def _stack_by_length(careers, gap_policy):
    groups = {}
    for years, sectors in careers:
        n = len(sectors)
        if n < 2:
            continue
        groups.setdefault(n, ([], []))
        groups[n][0].append(np.asarray(sectors, dtype=np.int64))
        groups[n][1].append(_pair_mask(years, gap_policy))
    return [(np.vstack(s), np.vstack(m)) for _, (s, m) in sorted(groups.items())]


def _shuffle_batch(stacks, n, rng):
    """Pooled transition counts for ``n`` independent shuffles, shape (n, 49)."""
    out = np.zeros((n, N_SECTORS * N_SECTORS), dtype=np.int64)
    offsets = (np.arange(n) * N_SECTORS * N_SECTORS)[:, None, None]
    for sectors, mask in stacks:
        R, L = sectors.shape
        order = np.argsort(rng.random((n, R, L)), axis=-1)
        perm = np.take_along_axis(np.broadcast_to(sectors, (n, R, L)), order, axis=-1)
        codes = perm[:, :, :-1] * N_SECTORS + perm[:, :, 1:] + offsets
        out += np.bincount(codes[:, mask].ravel(), minlength=n * N_SECTORS * N_SECTORS).reshape(n, -1)
    return out


def shuffle_counts(careers, n_shuffles=10000, seed=0, gap_policy="break", threads=1):
    """Pooled transition counts for each shuffle realization, shape (n_shuffles, 7, 7).

    Each realization permutes every researcher's sector labels over that researcher's
    own years; the year skeleton (and hence which pairs count) is fixed. Realizations
    come in fixed-size batches with their own substreams, so the result does not depend
    on ``threads``.
    """
    if n_shuffles < 2:
        raise ValueError("n_shuffles must be >= 2")
    stacks = _stack_by_length(careers, gap_policy)
    starts = list(range(0, n_shuffles, SHUFFLE_BATCH))

    def run(b):
        n = min(SHUFFLE_BATCH, n_shuffles - starts[b])
        return _shuffle_batch(stacks, n, substream(seed, "shuffle", b))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(starts))))
    else:
        parts = [run(b) for b in range(len(starts))]
    return np.concatenate(parts).reshape(n_shuffles, N_SECTORS, N_SECTORS)


def shuffle_null(careers, n_shuffles=10000, seed=0, gap_policy="break", threads=1):
    """Element-wise mean and SD (n - 1) of shuffled transition counts."""
    draws = shuffle_counts(careers, n_shuffles, seed, gap_policy, threads).astype(float)
    mean = draws.mean(axis=0)
    sd = np.sqrt(((draws - mean) ** 2).sum(axis=0) / (n_shuffles - 1))
    return ShuffleNull(mean, sd, n_shuffles)


@dataclass
class TransitionExcessMatrix:
    excess: np.ndarray
    observed: np.ndarray
    null_mean: np.ndarray
    null_sd: np.ndarray
    n_shuffles: int

    @property
    def defined(self):
        return self.null_mean > 0

    @property
    def zscore(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (self.observed - self.null_mean) / self.null_sd
        return np.where(self.null_sd > 0, z, np.nan)

    def to_frame(self):
        names = [s.name for s in SECTORS]
        rows = []
        for a in range(N_SECTORS):
            for b in range(N_SECTORS):
                rows.append({
                    "from": names[a], "to": names[b], "observed": int(self.observed[a, b]),
                    "null_mean": self.null_mean[a, b], "null_sd": self.null_sd[a, b],
                    "excess": self.excess[a, b], "defined": bool(self.defined[a, b]),
                })
        return pd.DataFrame(rows)


def excess_matrix(observed, null_mean, null_sd, n_shuffles=0):
    """Relative excess ``(observed - null_mean) / null_mean``; NaN where the null mean is 0."""
    observed = np.asarray(observed)
    null_mean = np.asarray(null_mean, dtype=float)
    null_sd = np.asarray(null_sd, dtype=float)
    if not observed.shape == null_mean.shape == null_sd.shape:
        raise ValueError("observed, null_mean and null_sd must have the same shape")
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = np.where(null_mean > 0, (observed - null_mean) / null_mean, np.nan)
    return TransitionExcessMatrix(excess, observed, null_mean, null_sd, n_shuffles)


def transition_analysis(career_years, categories, n_shuffles=10000, seed=0, gap_policy="break",
                        threads=1):
    """Excess matrices for the outlier and non-outlier groups of researchers."""
    result = {}
    for group, flag in (("outlier", False), ("non_outlier", True)):
        ids = categories.loc[categories["non_outlier"] == flag, "researcher_id"]
        careers = careers_from_frame(career_years, ids)
        obs = observed_counts(careers, gap_policy)
        if obs.sum() == 0:
            continue
        null = shuffle_null(careers, n_shuffles, derive_seed(seed, "transitions", group), gap_policy, threads)
        result[group] = excess_matrix(obs, null.mean, null.sd, n_shuffles)
    return result

