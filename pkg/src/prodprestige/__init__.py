"""Inflation-aware productivity and journal-prestige scores for researcher careers.

Modules
-------
corpus       load, join and filter publication records into career years
robust       Huber location and scale
normalize    productivity and size-corrected prestige z-scores
plane        the seven sectors of the prestige-productivity plane, researcher categories, entropy
transitions  sector transition counts and the career-shuffle null
stats        logistic regression, permutation tests, bootstrap intervals
bayes        hierarchical linear model and its Gibbs sampler
career       career-age trends and sector occupancy
synth        synthetic corpora with known ground truth
cli          the ``prodprestige`` command
"""

__version__ = "0.1.0"
