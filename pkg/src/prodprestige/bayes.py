"""Hierarchical linear model of prestige on productivity (and career age).

For researcher ``j`` and each of that researcher's productive years::

    I ~ Normal(c_j + beta_j * P + gamma_j * A, eps)
    c_j ~ Normal(mu_c, sigma_c),  beta_j ~ Normal(mu_P, sigma_P),  gamma_j ~ Normal(mu_A, sigma_A)
    eps ~ Uniform(0, 100),  mu_* ~ Normal(0, sqrt(1e5)),  sigma_* ~ InvGamma(1e-3, 1)

The sampler is blocked Gibbs: each researcher's coefficient vector and each group mean
is drawn from its exact normal full conditional, ``eps`` from its exact truncated
conditional, and each group standard deviation by slice sampling on ``log sigma``
(its conditional is log-concave there but has no closed form under a prior on the
standard deviation).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import logging
import math

import numpy as np
import pandas as pd
from scipy import stats

from .rng import substream

log = logging.getLogger(__name__)

COEF_NAMES = ("c", "P", "A")
LOG_SIGMA_BOUNDS = (-700.0, 700.0)


@dataclass(frozen=True)
class HierarchicalModelSpec:
    include_age: bool = False
    chains: int = 8
    iterations: int = 10_000
    burn_in: int = 5_000
    eps_max: float = 100.0
    normal_prior_variance: float = 1e5
    normal_prior_reading: str = "variance"  # "variance": sd = sqrt(1e5); "sd": sd = 1e5
    sigma_prior_shape: float = 1e-3
    sigma_prior_scale: float = 1.0
    sigma_prior_on: str = "sd"  # "sd" (literal prior on sigma) or "variance" (conjugate on sigma^2)
    researcher_thin: int = 10

    def __post_init__(self):
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must be in [0, iterations)")
        if self.chains < 2:
            raise ValueError("need at least two chains")
        if self.normal_prior_reading not in ("variance", "sd"):
            raise ValueError("normal_prior_reading must be 'variance' or 'sd'")
        if self.sigma_prior_on not in ("sd", "variance"):
            raise ValueError("sigma_prior_on must be 'sd' or 'variance'")

    @property
    def n_coef(self):
        return 3 if self.include_age else 2

    @property
    def prior_sd(self):
        if self.normal_prior_reading == "variance":
            return math.sqrt(self.normal_prior_variance)
        return self.normal_prior_variance

    @property
    def group_parameters(self):
        names = ["mu_c", "sigma_c", "mu_P", "sigma_P"]
        if self.include_age:
            names += ["mu_A", "sigma_A"]
        return names + ["epsilon"]


@dataclass
class RegressionData:
    """Observations of one discipline, grouped by researcher."""

    I: np.ndarray
    P: np.ndarray
    A: np.ndarray
    group: np.ndarray
    researcher_ids: list

    @property
    def n_researchers(self):
        return len(self.researcher_ids)

    @property
    def n_obs(self):
        return len(self.I)

    def design(self, include_age):
        cols = [np.ones_like(self.P), self.P]
        if include_age:
            cols.append(self.A)
        return np.column_stack(cols) if len(self.P) else np.zeros((0, len(cols)))

    @classmethod
    def from_frame(cls, frame):
        ids = sorted(frame["researcher_id"].unique())
        index = {r: k for k, r in enumerate(ids)}
        return cls(frame["I"].to_numpy(dtype=float), frame["P"].to_numpy(dtype=float),
                   frame["A"].to_numpy(dtype=float),
                   np.array([index[r] for r in frame["researcher_id"]], dtype=np.int64), ids)


def select_bayes_sample(career_years, categories, min_length=5, strict=True):
    """Regression data per discipline: non-outlier researchers with long careers.

    Career length is last publication year minus PhD year and must exceed
    ``min_length`` (or equal it when ``strict`` is False). Only years with career age
    ``A >= 1`` are kept. Disciplines with fewer than two eligible researchers are skipped.
    """
    cats = categories.set_index("researcher_id")
    length = cats["career_length"]
    ok_len = length > min_length if strict else length >= min_length
    eligible = set(cats.index[cats["non_outlier"].astype(bool) & ok_len])
    sel = career_years[career_years["researcher_id"].isin(eligible) & (career_years["A"] >= 1)]
    out = {}
    for disc, g in sel.groupby("discipline", sort=True):
        if g["researcher_id"].nunique() < 2:
            log.warning("discipline %s has fewer than two eligible researchers; skipped", disc)
            continue
        out[disc] = RegressionData.from_frame(g.sort_values(["researcher_id", "year"]))
    return out


@dataclass
class PosteriorSamples:
    """Draws per chain. ``group`` arrays have shape (chains, iterations) and include
    burn-in; ``researcher`` has shape (chains, kept, J, K) for post-burn-in draws thinned
    by ``spec.researcher_thin``."""

    spec: HierarchicalModelSpec
    group: dict
    researcher: np.ndarray
    researcher_ids: list
    seed: int = 0

    def draws(self, name, burned=True):
        x = self.group[name]
        return x[:, self.spec.burn_in:] if burned else x

    def pooled(self, name):
        return self.draws(name).ravel()

    def coefficient_draws(self, coef):
        k = COEF_NAMES.index(coef)
        return self.researcher[..., k]

    def to_long_frame(self, burned=True):
        rows = []
        for name in self.spec.group_parameters:
            x = self.draws(name, burned)
            start = self.spec.burn_in if burned else 0
            c, n = x.shape
            rows.append(pd.DataFrame({
                "chain": np.repeat(np.arange(c), n),
                "iteration": np.tile(np.arange(start, start + n), c),
                "parameter": name,
                "value": x.ravel(),
            }))
        return pd.concat(rows, ignore_index=True)


def slice_sample(logf, x0, rng, width=1.0, max_steps=64, lower=-np.inf, upper=np.inf):
    """One univariate slice-sampling update (stepping out, then shrinkage)."""
    f0 = logf(x0)
    level = f0 + math.log(rng.random() or 1e-300)
    left = x0 - width * rng.random()
    right = left + width
    j = int(rng.integers(max_steps))
    k = max_steps - 1 - j
    while j > 0 and left > lower and logf(left) > level:
        left -= width
        j -= 1
    while k > 0 and right < upper and logf(right) > level:
        right += width
        k -= 1
    left, right = max(left, lower), min(right, upper)
    for _ in range(200):
        x1 = left + rng.random() * (right - left)
        if logf(x1) > level:
            return x1
        if x1 < x0:
            left = x1
        else:
            right = x1
    return x0


def coef_conditional(xtx, xty, mu, sigma, eps):
    """Mean and precision of each researcher's coefficient vector given the rest."""
    K = len(mu)
    prec = xtx / eps**2 + np.eye(K) / sigma**2
    rhs = xty / eps**2 + mu / sigma**2
    mean = np.linalg.solve(prec, rhs[..., None])[..., 0]
    return mean, prec


def mu_conditional(b, sigma, prior_sd):
    """Mean and SD of a group mean given the researcher coefficients."""
    J = len(b)
    inv_var = math.exp(-2 * math.log(sigma)) if sigma > 0 else math.inf
    prec = J * inv_var + 1.0 / prior_sd**2
    return (b.sum() * inv_var) / prec, 1.0 / math.sqrt(prec)


def log_sigma_target(t, sq_dev, n, shape, scale):
    """Log conditional density of ``t = log sigma`` under an inverse-gamma prior on sigma."""
    return -(shape + n) * t - scale * math.exp(-t) - 0.5 * sq_dev * math.exp(-2 * t)


def log_eps_target(eps, sse, n, eps_max):
    if not 0 < eps < eps_max:
        return -np.inf
    return -n * math.log(eps) - 0.5 * sse / eps**2


def draw_eps(sse, n, eps_max, rng):
    """Exact draw of the noise SD under its uniform prior.

    ``u = 1 / eps**2`` is Gamma((n - 1) / 2, rate = sse / 2) truncated to ``u > 1/eps_max**2``.
    """
    if n < 2:
        t = slice_sample(lambda t: log_eps_target(math.exp(t), sse, n, eps_max) + t,
                         math.log(eps_max / 2), rng, upper=math.log(eps_max))
        return math.exp(t)
    shape = 0.5 * (n - 1)
    rate = 0.5 * max(sse, 1e-300)
    lower = 1.0 / eps_max**2
    for _ in range(64):
        u = rng.gamma(shape, 1.0 / rate)
        if u > lower:
            return 1.0 / math.sqrt(u)
    # the bound sits far in the upper tail: invert the survival function, which keeps
    # precision there, and slice sample if even the tail mass underflows
    dist = stats.gamma(shape, scale=1.0 / rate)
    tail = dist.sf(lower)
    if tail > 0:
        u = dist.isf(rng.random() * tail)
        if np.isfinite(u) and u > lower:
            return 1.0 / math.sqrt(u)
    t = slice_sample(lambda t: log_eps_target(math.exp(t), sse, n, eps_max) + t,
                     math.log(eps_max) - 1e-9, rng, upper=math.log(eps_max))
    return math.exp(t)


class _Suff:
    """Per-researcher sufficient statistics."""

    def __init__(self, data, include_age):
        X = data.design(include_age)
        J, K = data.n_researchers, X.shape[1]
        self.J, self.K, self.N = J, K, data.n_obs
        self.xtx = np.zeros((J, K, K))
        self.xty = np.zeros((J, K))
        self.yty = np.zeros(J)
        self.n = np.bincount(data.group, minlength=J)
        np.add.at(self.xtx, data.group, X[:, :, None] * X[:, None, :])
        np.add.at(self.xty, data.group, X * data.I[:, None])
        np.add.at(self.yty, data.group, data.I**2)
        self.X, self.y, self.g = X, data.I, data.group

    def sse(self, b):
        quad = np.einsum("jk,jkl,jl->", b, self.xtx, b)
        return float(self.yty.sum() - 2 * np.einsum("jk,jk->", b, self.xty) + quad)


def _initial_state(suff, spec, rng):
    J, K = suff.J, suff.K
    if suff.N >= K:
        pooled, *_ = np.linalg.lstsq(suff.X, suff.y, rcond=None)
    else:
        pooled = np.zeros(K)
    b = np.tile(pooled, (J, 1))
    for j in range(J):
        if suff.n[j] >= K + 1:
            try:
                b[j] = np.linalg.solve(suff.xtx[j] + 1e-6 * np.eye(K), suff.xty[j])
            except np.linalg.LinAlgError:
                pass
    spread = b.std(axis=0) if J > 1 else np.ones(K)
    b = b + rng.normal(0.0, 0.1, size=b.shape) * (spread + 0.05)
    mu = (b.mean(axis=0) if J else np.zeros(K)) + rng.normal(0.0, 0.1, size=K) * (spread + 0.05)
    sigma = (spread + 0.1) * np.exp(rng.normal(0.0, 0.3, size=K))
    resid = math.sqrt(max(suff.sse(b), 1e-6) / max(suff.N, 1)) if suff.N else 1.0
    eps = min(resid * math.exp(rng.normal(0.0, 0.2)), 0.9 * spec.eps_max)
    return b, mu, sigma, eps


def _run_chain(suff, spec, rng):
    J, K = suff.J, suff.K
    n_it = spec.iterations
    n_keep = len(range(spec.burn_in, n_it, spec.researcher_thin))
    mus = np.empty((n_it, K))
    sigmas = np.empty((n_it, K))
    epss = np.empty(n_it)
    kept = np.empty((n_keep, J, K))
    b, mu, sigma, eps = _initial_state(suff, spec, rng)
    shape, scale = spec.sigma_prior_shape, spec.sigma_prior_scale
    prior_sd = spec.prior_sd
    slot = 0
    for it in range(n_it):
        if J:
            mean, prec = coef_conditional(suff.xtx, suff.xty, mu, sigma, eps)
            chol = np.linalg.cholesky(prec)
            z = rng.standard_normal((J, K, 1))
            b = mean + np.linalg.solve(np.swapaxes(chol, 1, 2), z)[..., 0]
        for k in range(K):
            m, s = mu_conditional(b[:, k], sigma[k], prior_sd)
            mu[k] = m + s * rng.standard_normal()
        for k in range(K):
            sq = float(((b[:, k] - mu[k]) ** 2).sum())
            if spec.sigma_prior_on == "variance":
                var = (scale + 0.5 * sq) / rng.gamma(shape + 0.5 * J)
                sigma[k] = math.sqrt(var)
            else:
                t = slice_sample(lambda t: log_sigma_target(t, sq, J, shape, scale),
                                 math.log(sigma[k]), rng, lower=LOG_SIGMA_BOUNDS[0],
                                 upper=LOG_SIGMA_BOUNDS[1])
                sigma[k] = math.exp(t)
        eps = draw_eps(suff.sse(b), suff.N, spec.eps_max, rng) if suff.N else rng.uniform(0, spec.eps_max)
        mus[it], sigmas[it], epss[it] = mu, sigma, eps
        if it >= spec.burn_in and (it - spec.burn_in) % spec.researcher_thin == 0:
            kept[slot] = b
            slot += 1
    return mus, sigmas, epss, kept


def fit_hierarchical(data, spec=HierarchicalModelSpec(), seed=0, threads=1):
    """Sample the posterior with ``spec.chains`` independent chains.

    Chain ``c`` uses substream ``(seed, "chain", c)``; serial and threaded runs give
    identical draws.
    """
    suff = _Suff(data, spec.include_age)

    def run(c):
        return _run_chain(suff, spec, substream(seed, "chain", c))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(spec.chains)))
    else:
        results = [run(c) for c in range(spec.chains)]
    mus = np.stack([r[0] for r in results])
    sigmas = np.stack([r[1] for r in results])
    group = {}
    for k, coef in enumerate(COEF_NAMES[:suff.K]):
        group[f"mu_{coef}"] = mus[:, :, k]
        group[f"sigma_{coef}"] = sigmas[:, :, k]
    group["epsilon"] = np.stack([r[2] for r in results])
    researcher = np.stack([r[3] for r in results])
    return PosteriorSamples(spec, group, researcher, list(data.researcher_ids), seed)


def rhat(samples, parameter=None):
    """Split-chain Gelman-Rubin statistic.

    ``samples`` is a :class:`PosteriorSamples` (with ``parameter``) or an array of
    post-burn-in draws shaped (chains, draws). Returns NaN when every chain is constant
    at the same value and inf when chains are constant at different values.
    """
    x = samples.draws(parameter) if isinstance(samples, PosteriorSamples) else np.asarray(samples, float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 4:
        raise ValueError("need at least two chains with four draws each")
    half = x.shape[1] // 2
    split = np.concatenate([x[:, :half], x[:, x.shape[1] - half:]])
    n = split.shape[1]
    means = split.mean(axis=1)
    W = split.var(axis=1, ddof=1).mean()
    B = n * means.var(ddof=1)
    if W == 0:
        if B == 0:
            log.warning("R-hat undefined: all chains constant")
            return float("nan")
        return float("inf")
    var_plus = (n - 1) / n * W + B / n
    return float(math.sqrt(var_plus / W))


def mcse(draws):
    """Monte-Carlo standard error of the mean by batch means over pooled chains."""
    x = np.asarray(draws, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    n = x.shape[1]
    size = max(1, int(math.sqrt(n)))
    n_batches = n // size
    if n_batches < 2:
        return float(x.std(ddof=1) / math.sqrt(x.size))
    batches = x[:, :n_batches * size].reshape(x.shape[0], n_batches, size).mean(axis=2).ravel()
    return float(batches.std(ddof=1) / math.sqrt(batches.size))


@dataclass(frozen=True)
class ParameterSummary:
    mean: float
    sd: float
    lo: float
    hi: float
    rhat: float
    mcse: float

    def covers(self, value):
        return self.lo <= value <= self.hi


@dataclass
class PosteriorSummary:
    parameters: dict
    flags: list = field(default_factory=list)

    def __getitem__(self, name):
        return self.parameters[name]

    def to_dict(self):
        return {"parameters": {k: asdict(v) for k, v in self.parameters.items()}, "flags": self.flags}


def summarize_draws(x, level=0.95):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    alpha = (1 - level) / 2
    lo, hi = np.quantile(flat, [alpha, 1 - alpha])
    r = rhat(x) if x.ndim == 2 and x.shape[0] >= 2 and x.shape[1] >= 4 else float("nan")
    sd = float(flat.std(ddof=1)) if flat.size > 1 else 0.0
    return ParameterSummary(float(flat.mean()), sd, float(lo), float(hi), r, mcse(x) if sd > 0 else 0.0)


def posterior_summary(samples, level=0.95):
    """Pooled post-burn-in summaries of every group-level parameter."""
    params = {name: summarize_draws(samples.draws(name), level) for name in samples.spec.group_parameters}
    flags = []
    if params["epsilon"].mean < 1e-4:
        flags.append("epsilon_near_zero")
    for name, s in params.items():
        if not math.isfinite(s.rhat):
            flags.append(f"rhat_undefined:{name}")
        elif s.rhat > 1.1:
            flags.append(f"rhat_high:{name}")
    return PosteriorSummary(params, flags)


def posterior_density(samples, parameter, n_points=256):
    """Kernel density of the pooled draws on an even grid, as a frame (x, density)."""
    x = samples.pooled(parameter)
    if x.std() == 0:
        return pd.DataFrame({"x": [float(x[0])], "density": [np.inf]})
    kde = stats.gaussian_kde(x)
    lo, hi = np.quantile(x, [0.001, 0.999])
    pad = 0.1 * (hi - lo)
    grid = np.linspace(lo - pad, hi + pad, n_points)
    return pd.DataFrame({"x": grid, "density": kde(grid)})
