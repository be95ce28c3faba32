"""
Career-age patterns on a synthetic corpus
=========================================

A small synthetic corpus goes through the library pipeline: join journal metrics,
build researcher-years, normalize, classify. Then productivity and prestige are
followed along career age.
"""

from prodprestige import career, corpus, normalize, plane
from prodprestige.synth import generate_corpus

sc = generate_corpus(n_disciplines=1, researchers_per_discipline=120, year_start=2000, year_end=2012,
                     phd_year_range=(1975, 2008), seed=8)
joined = corpus.join_metrics(sc.publications, sc.metrics)
cy, _ = corpus.filter_disciplines(corpus.build_career_years(joined, sc.meta), min_researchers=50)
norm = normalize.normalize_corpus(cy, joined.records, n_realizations=300, seed=1)
cy = plane.add_sectors(norm.career_years)
categories = plane.categorize_all(cy)
print(categories["category"].value_counts().to_string())

# %%
# Sliding five-year windows of mean P and I with bootstrap intervals.
trends = career.sliding_window_trends(cy, n_resamples=500, min_n=30)
print(trends[["age", "n", "meanP", "loP", "hiP", "meanI"]].head(12).round(3).to_string(index=False))

# %%
# Mean sector occupancy per five-year career interval (IPpp omitted).
for disc, mat in career.occupancy_matrix(cy, min_researchers=10).items():
    print(disc)
    print(mat.round(3).to_string())

# %%
# Logistic models of being a perfectionist among outliers. With only a handful of
# outliers the hyperprolific-years model can be perfectly separated; the fit then
# says so in its diagnostic instead of reporting a finite slope as meaningful.
table = career.logistic_table(categories, by_discipline=False)
print(table[["model", "converged", "intercept", "slope", "slope_p", "diagnostic"]].round(4).to_string(index=False))
