"""Huber's joint M-estimation of location and scale ("proposal 2")."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.stats import norm

MAD_NORMAL = 0.6744897501960817


@dataclass(frozen=True)
class LocationScale:
    location: float
    scale: float
    converged: bool = True
    iterations: int = 0


def huber_kappa(c):
    """E[psi_c(Z)^2] for a standard normal Z; makes the scale consistent at the normal."""
    inner = 2.0 * norm.cdf(c) - 1.0
    return float(inner + c * c * (1.0 - inner) - 2.0 * c * norm.pdf(c))


def normalized_mad(values, center=None):
    x = np.asarray(values, dtype=float)
    if center is None:
        center = np.median(x)
    return float(np.median(np.abs(x - center)) / MAD_NORMAL)


def _residuals(x, mu, s, c, target):
    psi = np.clip((x - mu) / s, -c, c)
    return psi.sum(), (psi * psi).sum() - target


def huber_location_scale(values, c=1.5, tol=1e-8, max_iter=30):
    """Joint Huber estimate of location and scale.

    Solves ``sum(psi((x - mu)/s)) = 0`` and ``sum(psi((x - mu)/s)**2) = (n - 1) * kappa(c)``
    with ``psi`` the Huber function clipped at ``c``. Iteration starts at the median and
    the normalized MAD. Each step tries a Newton update on the two estimating equations
    and falls back to the classical alternating update whenever Newton does not shrink
    the residual more than the alternating step does.

    Parameters
    ----------
    values : array_like
        Sample; must be non-empty.
    c : float
        Huber tuning constant.
    tol : float
        Convergence tolerance on both coordinates, relative to the current scale.
    max_iter : int
        Iteration cap. On failure the result falls back to ``(median, normalized MAD)``
        with ``converged=False``.

    Returns
    -------
    LocationScale
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("huber_location_scale needs at least one value")
    if not c > 0 or not tol > 0:
        raise ValueError("c and tol must be positive")
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    n = x.size
    med = float(np.median(x))
    if n == 1 or np.all(x == x[0]):
        return LocationScale(float(x[0]), 0.0, True, 0)

    mad = normalized_mad(x, med)
    fallback = LocationScale(med, mad, False, max_iter)
    mu = med
    s = mad
    if s == 0.0:
        # more than half the sample is tied: start from the mean absolute deviation
        s = float(np.mean(np.abs(x - med))) * math.sqrt(math.pi / 2.0)

    target = (n - 1) * huber_kappa(c)
    for it in range(1, max_iter + 1):
        r = (x - mu) / s
        inside = np.abs(r) <= c
        psi = np.clip(r, -c, c)
        f = np.array([psi.sum(), (psi * psi).sum() - target])
        fnorm = math.hypot(f[0], f[1])

        candidates = []
        ri = r[inside]
        jac = np.array([
            [-inside.sum() / s, -ri.sum() / s],
            [-2.0 * ri.sum() / s, -2.0 * (ri * ri).sum() / s],
        ])
        try:
            step = np.linalg.solve(jac, -f)
            if np.all(np.isfinite(step)) and s + step[1] > 0:
                candidates.append((mu + step[0], s + step[1]))
        except np.linalg.LinAlgError:
            pass
        denom = target - (n - inside.sum()) * c * c
        if denom > 0:
            alt_mu = float(np.clip(x, mu - c * s, mu + c * s).mean())
            alt_s = math.sqrt(float(np.sum((x[inside] - alt_mu) ** 2)) / denom)
            if alt_s > 0:
                candidates.append((alt_mu, alt_s))
        if not candidates:
            return fallback

        # Newton can cycle between the pieces of these piecewise-smooth equations, so
        # take whichever candidate leaves the smaller residual; when neither improves,
        # the alternating update (last in the list) is the safe choice
        norms = [math.hypot(*_residuals(x, cm, cs, c, target)) for cm, cs in candidates]
        best = int(np.argmin(norms))
        new = candidates[best] if norms[best] < fnorm else candidates[-1]
        new_mu, new_s = new
        if abs(new_s - s) <= tol * new_s and abs(new_mu - mu) <= tol * new_s:
            return LocationScale(float(new_mu), float(new_s), True, it)
        mu, s = new_mu, new_s
    return fallback


def mean_sd(values):
    """Plain sample mean and standard deviation (n - 1), for sensitivity runs."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("mean_sd needs at least one value")
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return LocationScale(float(np.mean(x)), sd, True, 0)


def location_scale(values, estimator="huber", **kwargs):
    """Dispatch between the Huber estimator and plain moments."""
    if estimator == "huber":
        return huber_location_scale(values, **kwargs)
    if estimator == "moments":
        return mean_sd(values)
    raise ValueError(f"unknown estimator {estimator!r}")
