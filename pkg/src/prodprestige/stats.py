"""Logistic regression by IRLS, two-sample permutation tests and bootstrap intervals."""

from dataclasses import asdict, dataclass
import math

import numpy as np
from scipy import special
from scipy.stats import norm


@dataclass(frozen=True)
class LogisticFit:
    intercept: float
    slope: float
    intercept_se: float
    slope_se: float
    intercept_p: float
    slope_p: float
    converged: bool
    n: int
    iterations: int
    loglik: float
    diagnostic: str = ""

    @property
    def coefficients(self):
        return self.intercept, self.slope

    def significant(self, alpha=0.05):
        return self.converged and self.slope_p < alpha

    def to_dict(self):
        return asdict(self)


def _loglik(X, y, beta):
    eta = X @ beta
    # log(1 + exp(eta)) computed stably
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _separation(x, y):
    """"complete" when a threshold splits the classes, "quasi-complete" when they only
    share the boundary value, otherwise "". The MLE is infinite in both cases."""
    x0, x1 = x[y == 0], x[y == 1]
    if x0.max() < x1.min() or x1.max() < x0.min():
        return "complete"
    if x0.max() <= x1.min() or x1.max() <= x0.min():
        return "quasi-complete"
    return ""


def fit_logistic(x, y, max_iter=100, tol=1e-10):
    """Maximum-likelihood fit of ``P(y=1 | x) = expit(b0 + b1 * x)``.

    Uses iteratively reweighted least squares with step halving whenever the
    log-likelihood decreases. Standard errors come from the inverse information
    matrix at the optimum; p-values are two-sided Wald tests.

    Raises
    ------
    ValueError
        If lengths differ or only one outcome class is present.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y).astype(float).ravel()
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise ValueError("y must be boolean")
    n1 = int(y.sum())
    if n1 == 0 or n1 == len(y):
        raise ValueError("both outcome classes must be present")
    X = np.column_stack([np.ones_like(x), x])
    ybar = n1 / len(y)
    beta = np.array([math.log(ybar / (1 - ybar)), 0.0])
    ll = _loglik(X, y, beta)
    converged = False
    diagnostic = ""
    it = 0
    for it in range(1, max_iter + 1):
        mu = special.expit(X @ beta)
        w = mu * (1 - mu)
        info = X.T @ (X * w[:, None])
        try:
            step = np.linalg.solve(info, X.T @ (y - mu))
        except np.linalg.LinAlgError:
            diagnostic = "singular information matrix"
            break
        new_ll = _loglik(X, y, beta + step)
        halvings = 0
        while new_ll < ll and halvings < 30:
            step /= 2
            new_ll = _loglik(X, y, beta + step)
            halvings += 1
        beta = beta + step
        done = abs(new_ll - ll) < tol
        ll = new_ll
        if done:
            converged = True
            break
    else:
        diagnostic = f"no convergence after {max_iter} iterations"

    kind = _separation(x, y)
    if kind:
        converged = False
        diagnostic = f"{kind} separation: the outcome is a threshold function of x"

    mu = special.expit(X @ beta)
    info = X.T @ (X * (mu * (1 - mu))[:, None])
    try:
        cov = np.linalg.inv(info)
        se = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        se = np.array([np.inf, np.inf])
    with np.errstate(divide="ignore", invalid="ignore"):
        pvals = 2 * norm.sf(np.abs(beta / se))
    pvals = np.where(np.isfinite(pvals), pvals, 1.0)
    return LogisticFit(float(beta[0]), float(beta[1]), float(se[0]), float(se[1]),
                       float(pvals[0]), float(pvals[1]), converged, len(x), it, ll, diagnostic)


def predict_probability(fit, x):
    """Logistic probability ``expit(b0 + b1 * x)`` for a fit or an ``(b0, b1)`` pair."""
    b0, b1 = fit.coefficients if isinstance(fit, LogisticFit) else fit
    if not (math.isfinite(b0) and math.isfinite(b1)):
        raise ValueError("coefficients must be finite")
    p = special.expit(b0 + b1 * np.asarray(x, dtype=float))
    return float(p) if np.ndim(p) == 0 else p


@dataclass(frozen=True)
class PermutationResult:
    statistic: float
    p_value: float
    n_permutations: int


def mean_difference(a, b, axis=-1):
    return np.mean(a, axis=axis) - np.mean(b, axis=axis)


def permutation_test(group_a, group_b, n_permutations=100_000, statistic=None, rng=None,
                     batch_size=2000):
    """Two-sided permutation test of a two-sample statistic.

    The p-value is ``(1 + #{|perm| >= |observed|}) / (n_permutations + 1)``.
    ``statistic(a, b)`` defaults to the difference of means; custom statistics are
    called once per permutation.
    """
    a = np.asarray(group_a, dtype=float).ravel()
    b = np.asarray(group_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both groups must be non-empty")
    rng = np.random.default_rng(rng)
    pooled = np.concatenate([a, b])
    na = a.size
    if statistic is None:
        observed = float(mean_difference(a, b))
    else:
        observed = float(statistic(a, b))
    threshold = abs(observed) * (1 - 1e-12)
    hits = 0
    done = 0
    while done < n_permutations:
        m = min(batch_size, n_permutations - done)
        perm = rng.permuted(np.broadcast_to(pooled, (m, pooled.size)), axis=1)
        if statistic is None:
            stats = mean_difference(perm[:, :na], perm[:, na:])
        else:
            stats = np.array([statistic(row[:na], row[na:]) for row in perm])
        hits += int(np.count_nonzero(np.abs(stats) >= threshold))
        done += m
    return PermutationResult(observed, (1 + hits) / (n_permutations + 1), n_permutations)


def bootstrap_distribution(values, n_resamples=10_000, statistic=np.mean, rng=None, batch_size=1000):
    """Statistic over with-replacement resamples. ``statistic`` must accept ``axis``."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("values must be non-empty")
    rng = np.random.default_rng(rng)
    out = np.empty(n_resamples)
    done = 0
    while done < n_resamples:
        m = min(batch_size, n_resamples - done)
        idx = rng.integers(0, x.size, size=(m, x.size))
        out[done:done + m] = statistic(x[idx], axis=1)
        done += m
    return out


def bootstrap_ci(values, n_resamples=10_000, level=0.95, statistic=np.mean, rng=None):
    """Percentile bootstrap interval ``(lo, hi)``."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("values must be non-empty")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    if np.all(x == x[0]):
        return float(x[0]), float(x[0])
    dist = bootstrap_distribution(x, n_resamples, statistic, rng)
    alpha = (1 - level) / 2
    lo, hi = np.quantile(dist, [alpha, 1 - alpha])
    return float(lo), float(hi)


def compare_categories(career_years, categories, column, group_a, group_b, unit="year",
                       n_permutations=100_000, rng=None):
    """Permutation test of ``column`` between two researcher categories.

    ``unit="year"`` permutes researcher-year values; ``unit="researcher"`` first
    averages each researcher's years.
    """
    labels = categories.set_index("researcher_id")["category"]

    def values(group):
        ids = labels.index[labels == group]
        sub = career_years[career_years["researcher_id"].isin(ids)]
        if unit == "researcher":
            return sub.groupby("researcher_id")[column].mean().to_numpy()
        if unit == "year":
            return sub[column].to_numpy()
        raise ValueError("unit must be 'year' or 'researcher'")

    a, b = values(group_a), values(group_b)
    result = permutation_test(a, b, n_permutations, rng=rng)
    return {
        "column": column, "unit": unit, "group_a": group_a, "group_b": group_b,
        "mean_a": float(a.mean()), "sem_a": float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else float("nan"),
        "mean_b": float(b.mean()), "sem_b": float(b.std(ddof=1) / math.sqrt(b.size)) if b.size > 1 else float("nan"),
        "statistic": result.statistic, "p_value": result.p_value, "n_permutations": n_permutations,
    }
