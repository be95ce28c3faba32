"""Shared test utilities: the library pipeline on an in-memory corpus and the
grid-integration checks of the hierarchical model's full conditionals."""

import math
from types import SimpleNamespace

import numpy as np
from scipy import stats as sps

from prodprestige import bayes, corpus, normalize, plane
from prodprestige.rng import substream

from oracles import grid_cdf, grid_moments, log_joint


def run_library_pipeline(sc, n_realizations=300, seed=1, min_researchers=50):
    """Join, build, filter, normalize and classify an in-memory synthetic corpus."""
    joined = corpus.join_metrics(sc.publications, sc.metrics)
    cy = corpus.build_career_years(joined, sc.meta)
    filtered, report = corpus.filter_disciplines(cy, min_researchers)
    norm = normalize.normalize_corpus(filtered, joined.records, n_realizations=n_realizations, seed=seed)
    classified = plane.add_sectors(norm.career_years)
    return SimpleNamespace(synth=sc, joined=joined, career_years_raw=cy, filter_report=report, norm=norm,
                           cy=classified, categories=plane.categorize_all(classified))


# ---------------------------------------------------------------- hierarchical-model conditionals

PRIOR_SD = math.sqrt(1e5)


def bayes_toy():
    """Three researchers with a handful of years each, plus a fixed parameter state
    ``(data, b, mu, sigma, eps)``."""
    rng = np.random.default_rng(42)
    group = np.repeat(np.arange(3), [4, 6, 5])
    P = rng.normal(size=group.size)
    A = rng.integers(1, 20, group.size).astype(float)
    I = 0.3 - 0.2 * P + rng.normal(0, 0.7, group.size)
    data = bayes.RegressionData(I, P, A, group, ["a", "b", "c"])
    b = np.array([[0.2, -0.1], [0.4, -0.3], [0.1, -0.25]])
    return data, b, np.array([0.25, -0.2]), np.array([0.3, 0.15]), 0.7


def _lj(data, b, mu, sigma, eps):
    return log_joint(data.I, data.P, data.A, data.group, b, mu, sigma, eps, PRIOR_SD)


def coef_conditional_error(toy, j=1, n_grid=241):
    """Largest discrepancies between the closed-form coefficient conditional of
    researcher ``j`` and a brute-force 2-D grid over (c_j, beta_j) of the joint density.

    Returns ``(mean error in conditional SDs, relative covariance error)``.
    """
    data, b, mu, sigma, eps = toy
    suff = bayes._Suff(data, False)
    mean, prec = bayes.coef_conditional(suff.xtx, suff.xty, mu, sigma, eps)
    cov = np.linalg.inv(prec[j])
    sd = np.sqrt(np.diag(cov))
    gc = np.linspace(mean[j, 0] - 7 * sd[0], mean[j, 0] + 7 * sd[0], n_grid)
    gb = np.linspace(mean[j, 1] - 7 * sd[1], mean[j, 1] + 7 * sd[1], n_grid)
    lp = np.empty((n_grid, n_grid))
    for u, cv in enumerate(gc):
        for v, bv in enumerate(gb):
            bb = b.copy()
            bb[j] = cv, bv
            lp[u, v] = _lj(data, bb, mu, sigma, eps)
    w = np.exp(lp - lp.max())
    w /= w.sum()
    C, B = np.meshgrid(gc, gb, indexing="ij")
    m = np.array([(w * C).sum(), (w * B).sum()])
    dc, db = C - m[0], B - m[1]
    grid_cov = np.array([[(w * dc * dc).sum(), (w * dc * db).sum()],
                         [(w * dc * db).sum(), (w * db * db).sum()]])
    return float(np.max(np.abs(m - mean[j]) / sd)), float(np.max(np.abs(grid_cov - cov)) / np.abs(cov).max())


def mu_conditional_error(toy, k):
    """``(mean error in conditional SDs, relative SD error)`` of the group-mean conditional."""
    data, b, mu, sigma, eps = toy
    m, s = bayes.mu_conditional(b[:, k], sigma[k], PRIOR_SD)

    def logf(v):
        mm = mu.copy()
        mm[k] = v
        return _lj(data, b, mm, sigma, eps)

    gm, gs = grid_moments(logf, np.linspace(m - 8 * s, m + 8 * s, 2001))
    return abs(gm - m) / s, abs(gs - s) / s


def sigma_slice_ks(toy, n_iter=30_000, thin=3, seed=0):
    """KS distance between slice-sampled group SDs and the grid CDF of the joint density."""
    data, b, mu, sigma, eps = toy
    sq = float(((b[:, 1] - mu[1]) ** 2).sum())
    rng = substream(seed, "test-sigma")
    t = 0.0
    draws = []
    for it in range(n_iter):
        t = bayes.slice_sample(lambda u: bayes.log_sigma_target(u, sq, 3, 1e-3, 1.0), t, rng)
        if it % thin == 0:
            draws.append(math.exp(t))
    grid = np.linspace(1e-3, 6, 6000)

    def logf(v):
        s = sigma.copy()
        s[1] = v
        return _lj(data, b, mu, s, eps)

    cdf = grid_cdf(logf, grid)
    return sps.kstest(draws, lambda x: np.interp(x, grid, cdf)).statistic


def epsilon_draw_ks(toy, n=20_000, seed=0):
    """KS distance between exact noise-SD draws and the grid CDF of the joint density."""
    data, b, mu, sigma, _ = toy
    suff = bayes._Suff(data, False)
    sse = suff.sse(b)
    rng = substream(seed, "test-eps")
    draws = [bayes.draw_eps(sse, suff.N, 100.0, rng) for _ in range(n)]
    grid = np.linspace(0.05, 3.0, 6000)
    cdf = grid_cdf(lambda e: _lj(data, b, mu, sigma, e), grid)
    return sps.kstest(draws, lambda x: np.interp(x, grid, cdf)).statistic
