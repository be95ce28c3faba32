"""Synthetic corpora with known ground truth.

:func:`generate_corpus` writes the same three tables the loader reads, with every
planted quantity recorded in a :class:`GroundTruth`. Lighter generators produce data
for single stages: sector careers for the transition null, regression data for the
hierarchical model, and logistic outcomes.
"""

from dataclasses import asdict, dataclass, field
import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import special

from .bayes import RegressionData
from .corpus import write_table
from .normalize import prestige_null
from .plane import classify_sector
from .rng import substream
from .robust import huber_location_scale


class InfeasibleConfigError(ValueError):
    pass


@dataclass
class SynthConfig:
    n_disciplines: int = 3
    researchers_per_discipline: object = 150  # int, or one int per discipline
    year_start: int = 1997
    year_end: int = 2015
    phd_year_range: tuple = (1972, 2012)
    pre_phd_years: int = 2
    base_productivity: float = 4.0
    productivity_spread: float = 0.25
    productivity_drift: float = 1.57     # papers/year per decade
    n_journals: int = 400
    metric_log_mean: float = 0.5
    metric_log_sd: float = 0.5
    metric_drift: float = 0.72           # metric units per decade
    coverage: float = 0.95
    duplicate_rate: float = 0.01
    outlier_fraction: float = 0.12
    both_fraction: float = 0.15
    simultaneous_fraction: float = 0.5
    planted_counts: dict = None          # overrides the fractions, per discipline
    mean_outlier_years: float = 1.0
    persistence: float = 0.0
    mu_c: float = 0.0
    sigma_c: float = 0.3
    mu_P: float = -0.2
    sigma_P: float = 0.1
    mu_A: float = -0.01
    sigma_A: float = 0.005
    epsilon: float = 0.8
    theta0: float = 1.849
    theta1: float = -0.051
    non_outlier_cap: float = 3.0
    outlier_target: float = 6.0
    generator_realizations: int = 400
    generator_sweeps: int = 3
    seed: int = 0

    def sizes(self):
        r = self.researchers_per_discipline
        if isinstance(r, (list, tuple)):
            if len(r) != self.n_disciplines:
                raise InfeasibleConfigError("researchers_per_discipline needs one entry per discipline")
            return [int(x) for x in r]
        return [int(r)] * self.n_disciplines

    def validate(self):
        rates = {"coverage": self.coverage, "duplicate_rate": self.duplicate_rate,
                 "outlier_fraction": self.outlier_fraction, "both_fraction": self.both_fraction,
                 "simultaneous_fraction": self.simultaneous_fraction}
        for name, v in rates.items():
            if not 0 <= v <= 1:
                raise InfeasibleConfigError(f"{name} must be in [0, 1]")
        if self.coverage == 0:
            raise InfeasibleConfigError("coverage must be positive")
        for name in ("sigma_c", "sigma_P", "sigma_A", "epsilon", "metric_log_sd"):
            if getattr(self, name) < 0:
                raise InfeasibleConfigError(f"{name} must be non-negative")
        if self.year_end < self.year_start:
            raise InfeasibleConfigError("year_end before year_start")
        if self.n_journals < 10:
            raise InfeasibleConfigError("need at least 10 journals per discipline")
        if min(self.sizes()) < 2:
            raise InfeasibleConfigError("need at least two researchers per discipline")
        if not 0 <= self.persistence < 1:
            raise InfeasibleConfigError("persistence must be in [0, 1)")
        if self.outlier_target <= 3.5 or self.non_outlier_cap >= 3.5:
            raise InfeasibleConfigError("targets must straddle the 3.5 outlier threshold")
        if self.phd_year_range[0] > self.phd_year_range[1]:
            raise InfeasibleConfigError("empty phd_year_range")

    def to_dict(self):
        return asdict(self)


@dataclass
class GroundTruth:
    researchers: pd.DataFrame
    years: pd.DataFrame
    active: pd.DataFrame
    n_articles: int
    n_matched: int
    n_duplicates: int
    config: dict = field(default_factory=dict)

    @property
    def match_rate(self):
        return self.n_matched / self.n_articles

    def planted_counts(self, discipline=None):
        r = self.researchers
        if discipline is not None:
            r = r[r["discipline"] == discipline]
        return r["category"].value_counts().to_dict()

    def to_json(self, path=None):
        doc = {
            "config": self.config,
            "n_articles": self.n_articles, "n_matched": self.n_matched,
            "n_duplicates": self.n_duplicates, "match_rate": self.match_rate,
            "researchers": self.researchers.to_dict(orient="records"),
            "active": self.active.to_dict(orient="records"),
        }
        text = json.dumps(doc, indent=1, sort_keys=True, default=_json_default)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(type(obj))


@dataclass
class SynthCorpus:
    publications: pd.DataFrame
    metrics: pd.DataFrame
    meta: pd.DataFrame
    truth: GroundTruth

    def write(self, directory):
        """Write publications.csv, metrics.csv, meta.csv and truth.json; returns the paths."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = {name: d / f"{name}.csv" for name in ("publications", "metrics", "meta")}
        write_table(self.publications, paths["publications"])
        write_table(self.metrics, paths["metrics"])
        write_table(self.meta, paths["meta"])
        paths["truth"] = d / "truth.json"
        self.truth.to_json(paths["truth"])
        return paths


def _choose_journals(values, p, target, tol, rng, start=None, max_steps=200):
    """Indices of ``p`` journals (sorted ``values``) whose mean metric is near ``target``.

    Greedy coordinate search: each step swaps the single slot whose best replacement
    brings the mean closest to ``target``, and stops when no swap improves it.
    """
    n = values.size
    idx = rng.integers(0, n, size=p) if start is None else np.array(start, dtype=np.int64)
    target = min(max(target, values[0]), values[-1])
    total = float(values[idx].sum())
    for _ in range(max_steps):
        err = abs(total / p - target)
        if err <= tol:
            break
        desired = values[idx] + (target * p - total)
        cand = np.clip(np.searchsorted(values, desired), 1, n - 1)
        cand = np.where(np.abs(values[cand - 1] - desired) < np.abs(values[cand] - desired), cand - 1, cand)
        new_err = np.abs((total - values[idx] + values[cand]) / p - target)
        pos = int(np.argmin(new_err))
        if new_err[pos] >= err:
            break
        total += values[cand[pos]] - values[idx[pos]]
        idx[pos] = cand[pos]
    return idx


def _huber(values):
    est = huber_location_scale(values)
    if not est.scale > 0:
        raise InfeasibleConfigError("productivity cell with zero spread; raise base_productivity")
    return est


def _assign_categories(cfg, n, lengths, rng, discipline_index):
    cats = np.array(["non_outlier"] * n, dtype=object)
    order = rng.permutation(n)
    if cfg.planted_counts:
        counts = cfg.planted_counts
        if isinstance(next(iter(counts.values())), dict):
            counts = counts.get(discipline_index, {})
        taken = 0
        for name in ("exclusively_perfectionist", "exclusively_hyperprolific", "both_non_simultaneous",
                     "hyperprolific_perfectionist"):
            k = int(counts.get(name, 0))
            cats[order[taken:taken + k]] = name
            taken += k
        if taken > n:
            raise InfeasibleConfigError("planted_counts exceed researchers per discipline")
        return cats
    n_out = int(round(cfg.outlier_fraction * n))
    out = order[:n_out]
    n_both = int(round(cfg.both_fraction * n_out))
    n_sim = int(round(cfg.simultaneous_fraction * n_both))
    cats[out[:n_sim]] = "hyperprolific_perfectionist"
    cats[out[n_sim:n_both]] = "both_non_simultaneous"
    for j in out[n_both:]:
        perf = rng.random() < special.expit(cfg.theta0 + cfg.theta1 * lengths[j])
        cats[j] = "exclusively_perfectionist" if perf else "exclusively_hyperprolific"
    return cats


def _outlier_plan(category, years, rng, mean_years):
    """Map year -> kind ('Ipp', 'Ppp', 'IPpp') for a planted outlier researcher."""
    if category == "non_outlier":
        return {}
    years = list(years)
    kinds = {
        "exclusively_perfectionist": ["Ipp"],
        "exclusively_hyperprolific": ["Ppp"],
        "both_non_simultaneous": ["Ipp", "Ppp"],
        "hyperprolific_perfectionist": ["IPpp"],
    }[category]
    need = len(kinds) + int(rng.poisson(mean_years))
    need = min(need, len(years))
    if need < len(kinds):
        raise InfeasibleConfigError("researcher career too short for planted outlier years")
    chosen = sorted(rng.choice(len(years), size=need, replace=False))
    plan = {years[c]: kinds[k] for k, c in enumerate(chosen[:len(kinds)])}
    for c in chosen[len(kinds):]:
        options = ["Ipp", "Ppp"] if category in ("both_non_simultaneous", "hyperprolific_perfectionist") else kinds
        plan[years[c]] = options[int(rng.integers(len(options)))]
    return plan


def generate_corpus(config=None, **overrides):
    """Generate a synthetic corpus; deterministic in ``config.seed``."""
    cfg = config or SynthConfig()
    if overrides:
        cfg = SynthConfig(**{**asdict(cfg), **overrides})
    cfg.validate()
    years = np.arange(cfg.year_start, cfg.year_end + 1)
    pubs, metric_rows, meta_rows, res_rows, year_rows, active_rows = [], [], [], [], [], []
    n_articles = n_matched = n_dup = 0

    for k, n_res in enumerate(cfg.sizes()):
        disc = f"D{k + 1:02d}"
        rng = substream(cfg.seed, "discipline", k)
        base = np.sort(rng.lognormal(cfg.metric_log_mean, cfg.metric_log_sd, size=cfg.n_journals))
        journal_ids = [f"{disc}-J{n:04d}" for n in range(cfg.n_journals)]
        n_unindexed = max(5, cfg.n_journals // 10)
        unindexed_ids = [f"{disc}-U{n:04d}" for n in range(n_unindexed)]
        jitter = rng.normal(0.0, 0.02, size=(len(years), cfg.n_journals))
        journal_metric = {}
        for t, y in enumerate(years):
            shift = cfg.metric_drift * (y - cfg.year_start) / 10.0
            vals = base * np.exp(jitter[t]) + shift
            order = np.argsort(vals, kind="stable")
            journal_metric[int(y)] = (vals[order], order)
            for n in range(cfg.n_journals):
                metric_rows.append((journal_ids[n], int(y), round(float(vals[n]), 6)))

        rids = [f"{disc}-R{n:04d}" for n in range(n_res)]
        phd = rng.integers(cfg.phd_year_range[0], cfg.phd_year_range[1] + 1, size=n_res)
        first = np.maximum(cfg.year_start, phd - cfg.pre_phd_years)
        rate = cfg.base_productivity * np.exp(cfg.productivity_spread * rng.standard_normal(n_res))
        c = rng.normal(cfg.mu_c, cfg.sigma_c, n_res)
        beta = rng.normal(cfg.mu_P, cfg.sigma_P, n_res)
        gamma = rng.normal(cfg.mu_A, cfg.sigma_A, n_res)
        lengths = cfg.year_end - phd
        cats = _assign_categories(cfg, n_res, lengths, rng, k)
        plans = [_outlier_plan(cats[j], range(first[j], cfg.year_end + 1), rng, cfg.mean_outlier_years)
                 for j in range(n_res)]
        for j in range(n_res):
            meta_rows.append((rids[j], disc, int(phd[j])))
            res_rows.append({
                "researcher_id": rids[j], "discipline": disc, "phd_year": int(phd[j]),
                "category": cats[j], "c": c[j], "beta": beta[j], "gamma": gamma[j],
                "career_length": int(lengths[j]),
                "perfectionist": cats[j] != "exclusively_hyperprolific" and cats[j] != "non_outlier",
                "eligible": cats[j] == "non_outlier" and lengths[j] > 5,
            })

        noise = np.zeros(n_res)
        for t, y in enumerate(years):
            y = int(y)
            active = np.flatnonzero(first <= y)
            active_rows.append({"discipline": disc, "year": y, "active": int(active.size)})
            lam = rate[active] + cfg.productivity_drift * (y - cfg.year_start) / 10.0
            counts = 1 + rng.poisson(np.maximum(lam - 1.0, 0.0))
            kinds = [plans[j].get(y) for j in active]
            inflate = np.array([kd in ("Ppp", "IPpp") for kd in kinds])
            for _ in range(3):
                est = _huber(counts)
                cap = math.floor(est.location + cfg.non_outlier_cap * est.scale)
                counts = np.where(inflate, counts, np.minimum(counts, cap))
            est = _huber(counts[~inflate] if (~inflate).sum() >= 2 else counts)
            counts = np.where(inflate, np.ceil(est.location + cfg.outlier_target * est.scale), counts)
            counts = np.where(np.array([kd in ("Ipp",) for kd in kinds]), np.maximum(counts, 3), counts)
            counts = counts.astype(np.int64)
            final = _huber(counts)
            P = (counts - final.location) / final.scale

            values, order = journal_metric[y]
            innov = rng.standard_normal(n_res)
            noise = cfg.persistence * noise + math.sqrt(1 - cfg.persistence**2) * innov
            raw = np.empty(active.size)
            for a, j in enumerate(active):
                raw[a] = c[j] + beta[j] * P[a] + gamma[j] * (y - int(phd[j])) + cfg.epsilon * noise[j]
            planted_i = np.array([kd in ("Ipp", "IPpp") for kd in kinds])
            # The pipeline's null is built from the articles actually published, which the
            # choices below determine; refit against the realized pool a few times so the
            # generator's prestige values agree with what the pipeline will recompute.
            # Article-weighted metric means must roughly average to the pool location, so
            # the non-outlier targets get a common shift that keeps that balance; a shift
            # constant within the discipline-year only moves the intercept.
            pool = values
            picks = [None] * active.size
            targets = raw
            for sweep in range(cfg.generator_sweeps + 1):
                gen_rng = substream(cfg.seed, "generator-null", k, y, sweep)
                nulls = {int(p): prestige_null(pool, int(p), cfg.generator_realizations, gen_rng)
                         for p in np.unique(counts)}
                if any(not v[1] > 0 for v in nulls.values()):
                    raise InfeasibleConfigError(
                        f"prestige null of {disc} in {y} collapsed to zero spread; the journal pool cannot "
                        "balance the planted outlier level")
                if sweep == cfg.generator_sweeps:
                    break
                w = counts * np.array([nulls[int(p)][1] for p in counts])
                gap = np.sum(counts * (np.array([nulls[int(p)][0] for p in counts]) - pool.mean()))
                shift = -(gap + np.sum(w[~planted_i] * raw[~planted_i]) + cfg.outlier_target * np.sum(w[planted_i]))
                shift /= np.sum(w[~planted_i])
                targets = np.where(planted_i, cfg.outlier_target,
                                   np.clip(raw + shift, -cfg.non_outlier_cap, cfg.non_outlier_cap))
                for a in range(active.size):
                    loc, scale = nulls[int(counts[a])]
                    picks[a] = _choose_journals(values, int(counts[a]), loc + targets[a] * scale,
                                                0.01 * scale, rng, start=picks[a])
                pool = np.sort(np.concatenate([values[pk] for pk in picks]))
            for a, j in enumerate(active):
                A = y - int(phd[j])
                p = int(counts[a])
                kind = kinds[a]
                loc, scale = nulls[p]
                realized = (float(values[picks[a]].mean()) - loc) / scale
                if kind in ("Ipp", "IPpp") and realized < 0.5 * (3.5 + cfg.outlier_target):
                    raise InfeasibleConfigError(
                        f"journal pool of {disc} cannot reach the planted prestige outlier level")
                intended = kind or classify_sector(realized, float(P[a])).name
                year_rows.append({
                    "researcher_id": rids[j], "discipline": disc, "year": y, "A": A, "p": p,
                    "P": float(P[a]), "I_target": float(targets[a]), "I_generator": realized,
                    "sector": intended, "kind": kind or "",
                })
                picks_a = picks[a]
                n_un = int(rng.poisson(p * (1 - cfg.coverage) / cfg.coverage))
                seq = 0
                for pick in picks_a:
                    pubs.append((rids[j], disc, y, journal_ids[order[pick]], f"10.9999/{rids[j]}.{y}.{seq}"))
                    seq += 1
                for _ in range(n_un):
                    jid = unindexed_ids[int(rng.integers(n_unindexed))]
                    pubs.append((rids[j], disc, y, jid, f"10.9999/{rids[j]}.{y}.{seq}"))
                    seq += 1
                n_articles += p + n_un
                n_matched += p
                for _ in range(int(rng.binomial(p, cfg.duplicate_rate))):
                    dup_seq = int(rng.integers(p))
                    pubs.append((rids[j], disc, y, journal_ids[order[picks_a[dup_seq]]],
                                 f"10.9999/{rids[j]}.{y}.{dup_seq}"))
                    n_dup += 1

    publications = pd.DataFrame(pubs, columns=["researcher_id", "discipline", "year", "journal_id", "doi"])
    metrics = pd.DataFrame(metric_rows, columns=["journal_id", "year", "value"])
    meta = pd.DataFrame(meta_rows, columns=["researcher_id", "discipline", "phd_year"])
    truth = GroundTruth(pd.DataFrame(res_rows), pd.DataFrame(year_rows), pd.DataFrame(active_rows),
                        n_articles, n_matched, n_dup, cfg.to_dict())
    return SynthCorpus(publications, metrics, meta, truth)


def generate_sector_careers(n_researchers=500, n_years=15, persistence=0.0, probs=None, seed=0,
                            start_year=2000):
    """Sector careers from a sticky Markov chain.

    Each year keeps the previous sector with probability ``persistence`` and otherwise
    draws from ``probs`` (uniform over the 7 sectors by default), so ``persistence=0``
    gives i.i.d. sectors.
    """
    rng = substream(seed, "sector-careers")
    probs = np.full(7, 1 / 7) if probs is None else np.asarray(probs, dtype=float) / np.sum(probs)
    careers = []
    years = np.arange(start_year, start_year + n_years)
    for _ in range(n_researchers):
        s = np.empty(n_years, dtype=np.int64)
        s[0] = rng.choice(7, p=probs)
        for t in range(1, n_years):
            s[t] = s[t - 1] if rng.random() < persistence else rng.choice(7, p=probs)
        careers.append((years.copy(), s))
    return careers


def careers_to_frame(careers, prefix="R"):
    rows = []
    for n, (years, sectors) in enumerate(careers):
        for y, s in zip(years, sectors):
            rows.append((f"{prefix}{n:05d}", int(y), int(s)))
    return pd.DataFrame(rows, columns=["researcher_id", "year", "sector"])


def generate_hierarchical_data(n_researchers=50, n_years=15, mu_c=0.0, sigma_c=0.3, mu_P=-0.2,
                               sigma_P=0.1, mu_A=-0.01, sigma_A=0.005, epsilon=0.8, seed=0,
                               age_orthogonal=False):
    """Regression data drawn from the hierarchical model itself.

    Returns ``(data, coefficients)`` where ``coefficients`` has columns c, beta, gamma.
    Career age runs 1..n_years; productivity scores are standard normal. With
    ``age_orthogonal=True`` each researcher's scores are made exactly orthogonal to an
    intercept and to career age (then rescaled to unit variance), so career age
    carries no in-sample information about productivity.
    """
    rng = substream(seed, "hierarchical")
    J, T = n_researchers, n_years
    c = rng.normal(mu_c, sigma_c, J)
    beta = rng.normal(mu_P, sigma_P, J)
    gamma = rng.normal(mu_A, sigma_A, J)
    P = rng.standard_normal((J, T))
    A = np.tile(np.arange(1, T + 1, dtype=float), (J, 1))
    if age_orthogonal:
        if T < 3:
            raise InfeasibleConfigError("age_orthogonal needs at least three years per researcher")
        Z = np.column_stack([np.ones(T), A[0]])
        P = P - (Z @ np.linalg.lstsq(Z, P.T, rcond=None)[0]).T
        P /= P.std(axis=1, ddof=1, keepdims=True)
    I = c[:, None] + beta[:, None] * P + gamma[:, None] * A + epsilon * rng.standard_normal((J, T))
    data = RegressionData(I.ravel(), P.ravel(), A.ravel(), np.repeat(np.arange(J), T),
                          [f"R{j:04d}" for j in range(J)])
    return data, pd.DataFrame({"c": c, "beta": beta, "gamma": gamma})


def generate_logistic_data(n=5000, theta0=1.849, theta1=-0.051, x_range=(1, 40), seed=0):
    """Integer covariate uniform on ``x_range`` and Bernoulli outcomes from the logistic model."""
    rng = substream(seed, "logistic")
    x = rng.integers(x_range[0], x_range[1] + 1, size=n).astype(float)
    y = rng.random(n) < special.expit(theta0 + theta1 * x)
    return x, y
