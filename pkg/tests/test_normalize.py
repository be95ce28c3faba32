import numpy as np
import pandas as pd
import pytest

from prodprestige import normalize
from prodprestige.normalize import (DegenerateScaleError, normalize_corpus, prestige_null,
                                    prestige_zscore, productivity_zscore, sample_null_means)
from prodprestige.robust import LocationScale, huber_location_scale
from prodprestige.rng import substream

from oracles import huber_proposal2, prestige_null_oracle


def test_productivity_zscore():
    norm = LocationScale(4.0, 2.0)
    assert productivity_zscore(4.0, norm) == 0.0
    assert productivity_zscore(6.0, norm) == 1.0
    np.testing.assert_allclose(productivity_zscore([2, 8], norm), [-1, 2])
    with pytest.raises(DegenerateScaleError):
        productivity_zscore(1, LocationScale(1.0, 0.0))


def test_prestige_zscore():
    assert prestige_zscore(3.0, (3.0, 0.5)) == 0.0
    assert prestige_zscore(4.0, (3.0, 0.5)) == 2.0
    with pytest.raises(DegenerateScaleError):
        prestige_zscore(3.0, (3.0, 0.0))


def test_constant_pool():
    assert prestige_null([2.0], 5, 100, np.random.default_rng(0)) == (2.0, 0.0)
    assert prestige_null([2.0, 2.0, 2.0], 1, 100, np.random.default_rng(0)) == (2.0, 0.0)


def test_empty_pool_and_bad_arguments():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        prestige_null([], 2, 100, rng)
    with pytest.raises(ValueError):
        sample_null_means([1.0, 2.0], 0, 100, rng)
    with pytest.raises(ValueError):
        sample_null_means([1.0, 2.0], 3, 100, rng, replace=False)


def test_duplicate_implementation_oracle():
    pool = np.arange(1.0, 11.0)
    loc, scale = prestige_null(pool, 4, 1000, np.random.default_rng(42))
    means = prestige_null_oracle(pool, 4, 1000, np.random.default_rng(42))
    ref_loc, ref_scale = huber_proposal2(means)
    assert loc == pytest.approx(ref_loc, abs=1e-9)
    assert scale == pytest.approx(ref_scale, abs=1e-9)


def test_single_article_null_is_pool_location():
    pool = np.random.default_rng(1).lognormal(0.5, 0.5, 3000)
    loc, _ = prestige_null(pool, 1, 50_000, np.random.default_rng(2))
    assert loc == pytest.approx(huber_location_scale(pool).location, abs=0.02)


def test_null_scale_decreases_with_p():
    pool = np.random.default_rng(1).lognormal(0.5, 0.5, 3000)
    scales = [prestige_null(pool, p, 2000, substream(0, p))[1] for p in (1, 2, 5, 10, 20, 50)]
    assert all(a > b for a, b in zip(scales, scales[1:]))


def test_without_replacement_mode():
    pool = np.arange(10.0)
    means = sample_null_means(pool, 10, 5, np.random.default_rng(0), replace=False)
    np.testing.assert_allclose(means, 4.5)


def test_moments_estimator_switch():
    pool = np.random.default_rng(1).lognormal(0.5, 0.5, 500)
    rng_a, rng_b = np.random.default_rng(3), np.random.default_rng(3)
    loc, scale = prestige_null(pool, 3, 1000, rng_a, estimator="moments")
    means = sample_null_means(pool, 3, 1000, rng_b)
    assert (loc, scale) == (pytest.approx(means.mean()), pytest.approx(means.std(ddof=1)))


def test_null_researchers_rarely_exceed_threshold():
    # researchers whose articles are uniform draws from the pool behave like the null
    rng = np.random.default_rng(9)
    pool = rng.lognormal(0.5, 0.5, 5000)
    hits = 0
    for p in rng.integers(1, 30, size=1000):
        null = prestige_null(pool, int(p), 1000, substream(0, int(p)))
        i = pool[rng.integers(0, pool.size, size=p)].mean()
        hits += abs(prestige_zscore(i, null)) >= 3.5
    assert hits <= 10


def tiny_corpus():
    rows, arts = [], []
    rng = np.random.default_rng(0)
    for r in range(12):
        for y in (2000, 2001):
            p = int(rng.integers(1, 6))
            metrics = rng.lognormal(0, 0.5, p)
            for m in metrics:
                arts.append(("D", f"r{r}", y, m))
            rows.append(("D", f"r{r}", y, 1990, y - 1990, p, metrics.mean()))
    cy = pd.DataFrame(rows, columns=["discipline", "researcher_id", "year", "phd_year", "A", "p", "i"])
    articles = pd.DataFrame(arts, columns=["discipline", "researcher_id", "year", "metric"])
    return cy, articles


def test_normalize_corpus_matches_definition():
    cy, articles = tiny_corpus()
    res = normalize_corpus(cy, articles, n_realizations=200, seed=5)
    out = res.career_years
    assert len(out) == len(cy)
    for _, row in out.iterrows():
        cell = cy[(cy["year"] == row["year"])]["p"].to_numpy(dtype=float)
        loc, scale = huber_proposal2(cell)
        assert row["P"] == pytest.approx((row["p"] - loc) / scale, abs=1e-7)
        pool = np.sort(articles.loc[articles["year"] == row["year"], "metric"].to_numpy())
        nl, ns = prestige_null(pool, int(row["p"]), 200, substream(5, "null", "D", int(row["year"]), int(row["p"])))
        assert row["I"] == pytest.approx((row["i"] - nl) / ns, abs=1e-12)


def test_order_independence_and_threads():
    cy, articles = tiny_corpus()
    a = normalize_corpus(cy, articles, n_realizations=100, seed=1).career_years
    b = normalize_corpus(cy.sample(frac=1, random_state=3), articles.sample(frac=1, random_state=4),
                         n_realizations=100, seed=1, threads=4).career_years
    pd.testing.assert_frame_equal(a, b)


def test_degenerate_corpus_reported():
    cy = pd.DataFrame({"discipline": "D", "researcher_id": ["a", "b", "c"], "year": 2000, "phd_year": 1990,
                       "A": 10, "p": 2, "i": 1.5})
    articles = pd.DataFrame({"discipline": "D", "researcher_id": list("aabbcc"), "year": 2000, "metric": 1.5})
    res = normalize_corpus(cy, articles, n_realizations=50)
    assert res.career_years.empty
    assert res.report["degenerate_cells"] == [["D", 2000]]
    assert res.report["n_excluded_degenerate_cell"] == 3


def test_cache_round_trip(tmp_path):
    cy, articles = tiny_corpus()
    cache = tmp_path / "nulls.json"
    a = normalize_corpus(cy, articles, n_realizations=100, seed=2, cache_path=cache)
    assert cache.is_file()
    b = normalize_corpus(cy, articles, n_realizations=100, seed=2, cache_path=cache)
    assert a.null_table == b.null_table
    c = normalize_corpus(cy, articles, n_realizations=100, seed=3, cache_path=cache)
    assert c.null_table != a.null_table


def test_planted_productivity_outliers(small_corpus):
    truth = small_corpus.synth.truth.years
    planted = truth[truth["kind"].isin(["Ppp", "IPpp"])][["researcher_id", "year"]]
    got = planted.merge(small_corpus.norm.career_years, on=["researcher_id", "year"])
    assert len(got) == len(planted) > 0
    assert (got["P"] > 3.5).all()


def test_generator_scores_agree_with_pipeline(small_corpus):
    m = small_corpus.synth.truth.years.merge(small_corpus.norm.career_years, on=["researcher_id", "year"],
                                             suffixes=("_truth", ""))
    np.testing.assert_allclose(m["P"], m["P_truth"], atol=1e-9)
    assert np.corrcoef(m["I"], m["I_generator"])[0, 1] > 0.98
