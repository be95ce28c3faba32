import numpy as np
import pandas as pd
import pytest

from prodprestige import transitions as tr
from prodprestige.plane import Sector
from prodprestige.synth import careers_to_frame, generate_sector_careers

from oracles import exact_shuffle_mean, transition_scan

Ipp, Ppp = int(Sector.Ipp), int(Sector.Ppp)


def test_consecutive_pair_counts():
    c = tr.count_transitions([2001, 2002], [Ipp, Ipp])
    assert c[Ipp, Ipp] == 1 and c.sum() == 1


def test_gap_breaks_chain():
    assert tr.count_transitions([2001, 2003], [Ipp, Ppp]).sum() == 0
    assert tr.count_transitions([2001, 2003], [Ipp, Ppp], gap_policy="bridge")[Ipp, Ppp] == 1


def test_unsorted_career_rejected():
    with pytest.raises(ValueError):
        tr.count_transitions([2002, 2001], [0, 1])
    with pytest.raises(ValueError):
        tr.count_transitions([2001, 2002], [0, 1], gap_policy="sideways")


@pytest.mark.parametrize("bridge", [False, True])
def test_counts_match_scan_oracle(bridge):
    rng = np.random.default_rng(11)
    total = np.zeros((7, 7), dtype=int)
    careers = []
    for _ in range(200):
        n = int(rng.integers(1, 12))
        years = np.sort(rng.choice(np.arange(1990, 2020), size=n, replace=False))
        sectors = rng.integers(0, 7, n)
        careers.append((years, sectors))
        total += transition_scan(list(years), list(sectors), bridge)
    policy = "bridge" if bridge else "break"
    obs = tr.observed_counts(careers, policy)
    assert np.array_equal(obs, total)
    pairs = sum((np.diff(y) == 1).sum() if not bridge else len(y) - 1 for y, _ in careers)
    assert obs.sum() == pairs


def test_shuffle_invariant_career():
    careers = [(np.arange(2000, 2006), np.full(6, Ppp))]
    draws = tr.shuffle_counts(careers, 100, seed=1)
    assert (draws == tr.observed_counts(careers)).all()


def test_two_year_career_exact():
    careers = [(np.array([2000, 2001]), np.array([Ipp, Ppp]))]
    null = tr.shuffle_null(careers, 20_000, seed=2)
    exact = exact_shuffle_mean(careers)
    assert exact[Ipp, Ppp] == exact[Ppp, Ipp] == 0.5
    se = null.sd / np.sqrt(20_000)
    assert abs(null.mean[Ipp, Ppp] - 0.5) < 3 * se[Ipp, Ppp]
    assert null.mean[Ipp, Ppp] + null.mean[Ppp, Ipp] == pytest.approx(1.0)


@pytest.mark.parametrize("bridge", [False, True])
def test_monte_carlo_matches_exhaustive_enumeration(bridge):
    rng = np.random.default_rng(5)
    careers = []
    for _ in range(12):
        n = int(rng.integers(2, 7))
        years = np.sort(rng.choice(np.arange(2000, 2009), size=n, replace=False))
        careers.append((years, rng.integers(0, 7, n)))
    policy = "bridge" if bridge else "break"
    n_shuffles = 4000
    null = tr.shuffle_null(careers, n_shuffles, seed=3, gap_policy=policy)
    exact = exact_shuffle_mean(careers, bridge)
    se = null.sd / np.sqrt(n_shuffles)
    varying = se > 0
    assert np.all(np.abs(null.mean - exact)[varying] <= 3 * se[varying])
    assert np.allclose(null.mean[~varying], exact[~varying])


def test_shuffle_preserves_sector_multisets():
    # One career at a time with every consecutive pair counted: each label's row sum is its
    # multiplicity minus one if it sits last, so multiplicities minus row sums is a single 1.
    for years, sectors in generate_sector_careers(20, 9, persistence=0.3, seed=4):
        occupancy = np.bincount(sectors, minlength=7)
        draws = tr.shuffle_counts([(years, sectors)], 60, seed=9, gap_policy="bridge")
        deficit_out = occupancy - draws.sum(axis=2)
        deficit_in = occupancy - draws.sum(axis=1)
        for d in (deficit_out, deficit_in):
            assert (d >= 0).all() and (d.sum(axis=1) == 1).all()


def test_determinism_and_thread_independence():
    careers = generate_sector_careers(60, 10, seed=5)
    a = tr.shuffle_counts(careers, 230, seed=7)
    b = tr.shuffle_counts(careers, 230, seed=7, threads=4)
    c = tr.shuffle_counts(careers, 230, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_n_shuffles_validated():
    with pytest.raises(ValueError):
        tr.shuffle_null([(np.array([1, 2]), np.array([0, 1]))], 1)


def test_excess_examples():
    mean = np.full((7, 7), 4.0)
    sd = np.ones((7, 7))
    assert np.all(tr.excess_matrix(mean, mean, sd).excess == 0)
    obs = mean.copy()
    obs[6, 6] = 1.23 * 4.0
    assert tr.excess_matrix(obs, mean, sd).excess[6, 6] == pytest.approx(0.23)
    mean[0, 0] = 0
    m = tr.excess_matrix(obs, mean, sd)
    assert np.isnan(m.excess[0, 0]) and not m.defined[0, 0]
    with pytest.raises(ValueError):
        tr.excess_matrix(obs[:3], mean, sd)


def test_iid_careers_calibrated():
    careers = generate_sector_careers(300, 12, persistence=0.0, seed=6)
    obs = tr.observed_counts(careers)
    null = tr.shuffle_null(careers, 1000, seed=1)
    z = tr.excess_matrix(obs, null.mean, null.sd).zscore
    defined = np.isfinite(z)
    assert np.mean(np.abs(z[defined]) <= 3) >= 0.97


def test_sticky_diagonal_positive():
    careers = generate_sector_careers(300, 12, persistence=0.4, seed=6)
    obs = tr.observed_counts(careers)
    null = tr.shuffle_null(careers, 500, seed=1)
    ex = tr.excess_matrix(obs, null.mean, null.sd).excess
    assert (np.diag(ex) > 0).all()


def test_transition_analysis_groups(small_corpus):
    res = tr.transition_analysis(small_corpus.cy, small_corpus.categories, n_shuffles=100, seed=0)
    assert set(res) == {"outlier", "non_outlier"}
    non = res["non_outlier"].observed
    assert non[:3, :].sum() == 0 and non[:, :3].sum() == 0
    frame = res["outlier"].to_frame()
    assert len(frame) == 49 and set(frame.columns) >= {"from", "to", "observed", "excess", "defined"}
