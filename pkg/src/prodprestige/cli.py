"""Command-line pipeline.

Every subcommand reads its inputs from, and writes its outputs to, one directory per
stage under ``--out``::

    synth/        publications.csv metrics.csv meta.csv truth.json
    ingest/       career_years.csv articles.csv inflation.csv validation.json
    normalize/    career_years.csv productivity_norms.csv null_table.csv null_cache.json report.json
    classify/     career_years.csv categories.csv venn.json year_summary.json extreme_hyperprolific.csv
    transitions/  outlier.csv non_outlier.csv
    entropy/      entropy.csv
    logistic/     logistic.csv comparisons.csv
    career/       trends.csv occupancy.csv
    bayes/        summary.csv density.csv flags.json
    report/       SVG figures and copies of every table

Each stage also writes ``manifest.json`` with the SHA-256 of its inputs and outputs,
the seed, the full settings, the manifests of the stages it consumed and timings.
Data files are byte-identical across reruns with the same inputs and settings; the
manifests are not, because they record timings.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
from dataclasses import asdict, dataclass, field, fields
import hashlib
import json
import logging
from pathlib import Path
import shutil
import sys
import time

import numpy as np
import pandas as pd

from . import __version__, bayes, career, corpus, normalize, plane, stats, svg, synth, transitions
from .rng import derive_seed, substream

log = logging.getLogger("prodprestige")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

STAGES = {
    "synth": (),
    "ingest": (),
    "normalize": ("ingest",),
    "classify": ("normalize",),
    "transitions": ("classify",),
    "entropy": ("classify",),
    "logistic": ("classify",),
    "career": ("classify",),
    "bayes": ("classify",),
    "report": ("classify", "transitions", "entropy", "logistic", "career", "bayes"),
}
PIPELINE = ("ingest", "normalize", "classify", "transitions", "entropy", "logistic", "career", "bayes",
            "report")
ID_DTYPES = {"researcher_id": str, "discipline": str, "journal_id": str, "doi": str}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class MissingArtifactError(DataError):
    pass


@dataclass
class RunConfig:
    """All pipeline settings; the defaults are the published analysis constants."""

    out: str = "prodprestige-out"
    publications: str = None
    metrics: str = None
    meta: str = None
    seed: int = 0
    threads: int = 1
    realizations: int = 1000
    shuffles: int = 10_000
    tau: float = plane.TAU
    chains: int = 8
    iters: int = 10_000
    burn_in: int = 5_000
    null_replacement: str = "with"
    gap_policy: str = "break"
    window: str = "centered"
    estimator: str = "huber"
    min_researchers: int = 50
    year_start: int = None
    year_end: int = None
    permutations: int = 100_000
    comparison_unit: str = "year"
    bootstrap: int = 10_000
    interval: int = 5
    min_interval_researchers: int = 20
    min_career_length: int = 5
    career_length_rule: str = "strict"
    normal_prior_reading: str = "variance"
    sigma_prior_on: str = "sd"
    synth: dict = field(default_factory=dict)

    def validate(self):
        choices = {
            "null_replacement": ("with", "without"),
            "gap_policy": transitions.GAP_POLICIES,
            "window": career.ALIGNMENTS,
            "estimator": ("huber", "moments"),
            "comparison_unit": ("year", "researcher"),
            "career_length_rule": ("strict", "inclusive"),
            "normal_prior_reading": ("variance", "sd"),
            "sigma_prior_on": ("sd", "variance"),
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise UsageError(f"{name} must be one of {', '.join(allowed)}")
        for name in ("realizations", "shuffles", "chains", "iters", "permutations", "bootstrap", "threads",
                     "interval"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.shuffles < 2:
            raise UsageError("shuffles must be at least 2")
        if not 0 <= self.burn_in < self.iters:
            raise UsageError("burn-in must be in [0, iters)")
        if self.chains < 2:
            raise UsageError("chains must be at least 2")
        if self.tau <= 0:
            raise UsageError("tau must be positive")
        return self

    @property
    def year_range(self):
        if self.year_start is None and self.year_end is None:
            return None
        return (self.year_start if self.year_start is not None else -10**9,
                self.year_end if self.year_end is not None else 10**9)

    def model_spec(self, include_age):
        return bayes.HierarchicalModelSpec(
            include_age=include_age, chains=self.chains, iterations=self.iters, burn_in=self.burn_in,
            normal_prior_reading=self.normal_prior_reading, sigma_prior_on=self.sigma_prior_on)


def load_config(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    doc = {k.replace("-", "_"): v for k, v in doc.items()}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def resolve_config(cli_values):
    """Defaults, overridden by the JSON config, overridden by the command line."""
    values = {}
    if cli_values.get("config"):
        values.update(load_config(cli_values["config"]))
    values.update({k: v for k, v in cli_values.items() if k != "config"})
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise UsageError(str(exc)) from None


# ----------------------------------------------------------------------------- files


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n",
                          encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def read_table(path):
    return pd.read_csv(path, dtype=ID_DTYPES, keep_default_na=False, na_values=[""])


class Stage:
    """Bookkeeping for one subcommand run: inputs, outputs, manifest."""

    def __init__(self, name, config):
        self.name = name
        self.config = config
        self.root = Path(config.out)
        self.dir = self.root / name
        self.inputs = []
        self.outputs = []
        self.upstream = {}
        self.started = time.perf_counter()

    def need(self, stage, filename):
        path = self.root / stage / filename
        if not path.is_file():
            raise MissingArtifactError(
                f"missing {path}; run the '{stage}' subcommand first (same --out)")
        manifest = self.root / stage / "manifest.json"
        if manifest.is_file() and stage not in self.upstream:
            self.upstream[stage] = sha256(manifest)
        self.inputs.append(path)
        return path

    def input_file(self, path):
        path = Path(path)
        if not path.is_file():
            raise DataError(f"input file {path} not found")
        self.inputs.append(path)
        return path

    def path(self, filename):
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / filename
        self.outputs.append(p)
        return p

    def table(self, frame, filename):
        corpus.write_table(frame, self.path(filename))

    def json(self, obj, filename):
        write_json(obj, self.path(filename))

    def finish(self, extra=None):
        manifest = {
            "subcommand": self.name,
            "version": __version__,
            "seed": self.config.seed,
            "settings": asdict(self.config),
            "inputs": {str(p): sha256(p) for p in self.inputs},
            "outputs": {str(p.relative_to(self.root)): sha256(p) for p in self.outputs},
            "upstream": self.upstream,
            "timings": {"seconds": round(time.perf_counter() - self.started, 3)},
        }
        if extra:
            manifest.update(extra)
        self.dir.mkdir(parents=True, exist_ok=True)
        write_json(manifest, self.dir / "manifest.json")
        return manifest


# ----------------------------------------------------------------------------- stages


def run_synth(cfg):
    st = Stage("synth", cfg)
    try:
        sc = synth.generate_corpus(synth.SynthConfig(**{"seed": cfg.seed, **cfg.synth}))
    except TypeError as exc:
        raise UsageError(f"bad synth settings: {exc}") from None
    st.dir.mkdir(parents=True, exist_ok=True)
    paths = sc.write(st.dir)
    st.outputs.extend(Path(p) for p in paths.values())
    return st.finish()


def run_ingest(cfg):
    st = Stage("ingest", cfg)
    given = [cfg.publications, cfg.metrics, cfg.meta]
    if any(given) and not all(given):
        raise UsageError("--publications, --metrics and --meta must be given together")
    if all(given):
        pub_path, met_path, meta_path = (st.input_file(p) for p in given)
    else:
        pub_path = st.need("synth", "publications.csv")
        met_path = st.need("synth", "metrics.csv")
        meta_path = st.need("synth", "meta.csv")
    try:
        pubs, pub_rep = corpus.load_publications(pub_path, cfg.year_range)
        metrics, met_rep = corpus.load_metrics(met_path)
        meta, meta_rep = corpus.load_meta(meta_path)
    except corpus.CorpusFormatError as exc:
        raise DataError(str(exc)) from None
    joined = corpus.join_metrics(pubs, metrics)
    cy = corpus.build_career_years(joined, meta)
    filtered, filt_rep = corpus.filter_disciplines(cy, cfg.min_researchers, cfg.year_range)
    if filtered.empty:
        raise DataError(f"no discipline has {cfg.min_researchers} researchers active in every year")
    kept = set(filtered["discipline"])
    articles = joined.records[joined.records["discipline"].isin(kept)]
    st.table(filtered, "career_years.csv")
    st.table(articles[["researcher_id", "discipline", "year", "journal_id", "doi", "metric"]], "articles.csv")
    trends = []
    for disc in [None, *sorted(kept)]:
        sub = filtered if disc is None else filtered[filtered["discipline"] == disc]
        try:
            t = corpus.inflation_trend(sub)
        except ValueError:
            continue
        trends.append({"discipline": disc or "all", **asdict(t)})
    st.table(pd.DataFrame(trends), "inflation.csv")
    for rep in (pub_rep, met_rep, meta_rep):
        # full paths live in the manifest; the data file stays independent of --out
        rep.source = Path(rep.source).name
    st.json({
        "publications": asdict(pub_rep), "metrics": asdict(met_rep), "meta": asdict(meta_rep),
        "join": {"n_total": joined.n_total, "n_matched": joined.n_matched,
                 "n_duplicates": joined.n_duplicates, "match_rate": joined.match_rate},
        "disciplines": filt_rep,
    }, "validation.json")
    return st.finish({"match_rate": joined.match_rate})


def run_normalize(cfg):
    st = Stage("normalize", cfg)
    cy = read_table(st.need("ingest", "career_years.csv"))
    articles = read_table(st.need("ingest", "articles.csv"))
    st.dir.mkdir(parents=True, exist_ok=True)
    cache = st.dir / "null_cache.json"
    res = normalize.normalize_corpus(
        cy, articles, n_realizations=cfg.realizations, seed=cfg.seed,
        replace=cfg.null_replacement == "with", estimator=cfg.estimator, threads=cfg.threads,
        cache_path=cache)
    if res.career_years.empty:
        raise DataError("normalization left no career years (all cells degenerate)")
    st.table(res.career_years, "career_years.csv")
    st.table(pd.DataFrame([{"discipline": d, "year": y, "location": e.location, "scale": e.scale}
                           for (d, y), e in sorted(res.productivity_table.items())]),
             "productivity_norms.csv")
    st.table(pd.DataFrame([{"discipline": d, "year": y, "p": p, "location": loc, "scale": scale}
                           for (d, y, p), (loc, scale) in sorted(res.null_table.items())]),
             "null_table.csv")
    st.json(res.report, "report.json")
    return st.finish()


def _classified(st):
    cy = read_table(st.need("classify", "career_years.csv"))
    cats = read_table(st.need("classify", "categories.csv"))
    return cy, cats


def run_classify(cfg):
    st = Stage("classify", cfg)
    cy = read_table(st.need("normalize", "career_years.csv"))
    cy = plane.add_sectors(cy, cfg.tau)
    cy["sector_name"] = [plane.Sector(s).name for s in cy["sector"]]
    cats = plane.categorize_all(cy)
    st.table(cy, "career_years.csv")
    st.table(cats, "categories.csv")
    st.json(plane.venn_counts(cats), "venn.json")
    st.json(plane.year_summary(cy), "year_summary.json")
    st.table(plane.extreme_hyperprolific(cy, tau=cfg.tau), "extreme_hyperprolific.csv")
    return st.finish()


def run_transitions(cfg):
    st = Stage("transitions", cfg)
    cy, cats = _classified(st)
    result = transitions.transition_analysis(cy, cats, cfg.shuffles, cfg.seed, cfg.gap_policy, cfg.threads)
    for group in ("outlier", "non_outlier"):
        if group in result:
            st.table(result[group].to_frame(), f"{group}.csv")
        else:
            log.warning("no transitions among %s researchers", group)
    return st.finish()


ENTROPY_GROUPS = {
    "outlier_all_outlier_sectors": ("outlier", plane.OUTLIER_SECTORS),
    "outlier_without_IPpp": ("outlier", (plane.Sector.Ipp, plane.Sector.Ppp)),
    "non_outlier": ("non_outlier", plane.NON_OUTLIER_SECTORS),
}


def run_entropy(cfg):
    st = Stage("entropy", cfg)
    cy, cats = _classified(st)
    frames = []
    for label, (group, sectors) in ENTROPY_GROUPS.items():
        e = plane.entropy_distribution(cy, cats, sectors, group)
        frames.append(e.assign(group=label)[["group", "researcher_id", "entropy"]])
    st.table(pd.concat(frames, ignore_index=True), "entropy.csv")
    return st.finish()


COMPARISONS = (("both", "exclusively_hyperprolific"), ("both", "exclusively_perfectionist"),
               ("exclusively_hyperprolific", "exclusively_perfectionist"))


def run_logistic(cfg):
    st = Stage("logistic", cfg)
    cy, cats = _classified(st)
    st.table(career.logistic_table(cats), "logistic.csv")
    rows = []
    present = set(cats["category"])
    for column in ("P", "I"):
        for a, b in COMPARISONS:
            if a in present and b in present:
                rng = substream(cfg.seed, "compare", column, a, b)
                rows.append(stats.compare_categories(cy, cats, column, a, b, cfg.comparison_unit,
                                                     cfg.permutations, rng))
    st.table(pd.DataFrame(rows), "comparisons.csv")
    return st.finish()


def run_career(cfg):
    st = Stage("career", cfg)
    cy, _ = _classified(st)
    trends = career.sliding_window_trends(cy, 5, cfg.window, cfg.bootstrap, seed=cfg.seed)
    st.table(trends, "trends.csv")
    occ = career.occupancy_matrix(cy, cfg.interval, cfg.min_interval_researchers)
    st.table(career.occupancy_frame(occ), "occupancy.csv")
    return st.finish()


def run_bayes(cfg):
    st = Stage("bayes", cfg)
    cy, cats = _classified(st)
    data = bayes.select_bayes_sample(cy, cats, cfg.min_career_length, cfg.career_length_rule == "strict")
    if not data:
        raise DataError("no discipline has two or more eligible non-outlier researchers")
    summary, density, flags = [], [], {}
    for disc, d in data.items():
        for model, include_age in (("without_age", False), ("with_age", True)):
            spec = cfg.model_spec(include_age)
            samples = bayes.fit_hierarchical(d, spec, derive_seed(cfg.seed, "bayes", disc, model), cfg.threads)
            post = bayes.posterior_summary(samples)
            for name, s in post.parameters.items():
                summary.append({"discipline": disc, "model": model, "parameter": name,
                                "n_researchers": d.n_researchers, "n_obs": d.n_obs, **asdict(s)})
            for name in ("mu_P", "mu_A") if include_age else ("mu_P",):
                dens = bayes.posterior_density(samples, name)
                density.append(dens.assign(discipline=disc, model=model, parameter=name))
            flags[f"{disc}/{model}"] = post.flags
    st.table(pd.DataFrame(summary), "summary.csv")
    st.table(pd.concat(density, ignore_index=True)[["discipline", "model", "parameter", "x", "density"]],
             "density.csv")
    st.json(flags, "flags.json")
    return st.finish()


def _density(values, n=200):
    values = np.asarray(values, dtype=float)
    grid = np.linspace(0, 1, n)
    if values.size < 2 or values.std() == 0:
        d = np.zeros(n)
        if values.size:
            d[np.argmin(np.abs(grid - values.mean()))] = 1.0
        return grid, d
    from scipy.stats import gaussian_kde
    return grid, gaussian_kde(values)(grid)


def run_report(cfg):
    st = Stage("report", cfg)
    cy, cats = _classified(st)
    st.dir.mkdir(parents=True, exist_ok=True)

    for stage, files in (("classify", ("categories.csv", "year_summary.json", "extreme_hyperprolific.csv",
                                       "venn.json")),
                         ("entropy", ("entropy.csv",)), ("logistic", ("logistic.csv", "comparisons.csv")),
                         ("career", ("trends.csv", "occupancy.csv")),
                         ("bayes", ("summary.csv", "density.csv", "flags.json"))):
        for f in files:
            src = st.need(stage, f)
            shutil.copyfile(src, st.path(f"{stage}_{f}"))
    for group in ("outlier", "non_outlier"):
        src = st.root / "transitions" / f"{group}.csv"
        st.need("transitions", "manifest.json")
        if src.is_file():
            st.inputs.append(src)
            shutil.copyfile(src, st.path(f"transitions_{group}.csv"))

    svg.scatter_plane(cy["P"], cy["I"], cy["sector"], cfg.tau, "career years").save(st.path("plane.svg"))

    logit = read_table(st.root / "logistic" / "logistic.csv")
    lines = {}
    x = np.arange(0, 11)
    for _, row in logit[(logit["model"] == "hyperprolific_years") & logit["converged"].astype(bool)].iterrows():
        p = stats.predict_probability((row["intercept"], row["slope"]), x)
        lines[row["discipline"]] = (x, p, p, p)
    svg.trend_bands(lines, "P(perfectionist) vs hyperprolific years", "hyperprolific years",
                    "probability").save(st.path("logistic_curve.svg"))

    ent = read_table(st.root / "entropy" / "entropy.csv")
    svg.ridgeline({g: _density(ent.loc[ent["group"] == g, "entropy"]) for g in ENTROPY_GROUPS},
                  "normalized entropy", "entropy").save(st.path("entropy.svg"))

    names = [s.name for s in plane.SECTORS]
    for group in ("outlier", "non_outlier"):
        src = st.root / "transitions" / f"{group}.csv"
        if not src.is_file():
            continue
        t = read_table(src)
        mat = t.pivot(index="from", columns="to", values="excess").reindex(index=names, columns=names)
        svg.heatmap(mat.to_numpy(), names, names, f"transition excess ({group})").save(
            st.path(f"transitions_{group}.svg"))

    trends = read_table(st.root / "career" / "trends.csv")
    for disc, g in trends.groupby("discipline", sort=True):
        series = {"P": (g["age"], g["meanP"], g["loP"], g["hiP"]), "I": (g["age"], g["meanI"], g["loI"], g["hiI"])}
        svg.trend_bands(series, f"{disc} sliding-window means").save(st.path(f"trends_{disc}.svg"))

    occ = read_table(st.root / "career" / "occupancy.csv")
    for disc, g in occ.groupby("discipline", sort=True):
        cols = list(dict.fromkeys(g["interval"]))
        rows = list(dict.fromkeys(g["sector"]))
        mat = g.pivot(index="sector", columns="interval", values="fraction").reindex(index=rows, columns=cols)
        svg.heatmap(mat.to_numpy(), rows, cols, f"{disc} sector occupancy", diverging=False).save(
            st.path(f"occupancy_{disc}.svg"))

    dens = read_table(st.root / "bayes" / "density.csv")
    for param, model in (("mu_P", "without_age"), ("mu_P", "with_age"), ("mu_A", "with_age")):
        sub = dens[(dens["parameter"] == param) & (dens["model"] == model)]
        curves = {d: (g["x"].to_numpy(), g["density"].to_numpy()) for d, g in sub.groupby("discipline")}
        svg.ridgeline(curves, f"posterior of {param} ({model.replace('_', ' ')})", param).save(
            st.path(f"posterior_{param}_{model}.svg"))
    return st.finish()


RUNNERS = {
    "synth": run_synth, "ingest": run_ingest, "normalize": run_normalize, "classify": run_classify,
    "transitions": run_transitions, "entropy": run_entropy, "logistic": run_logistic,
    "career": run_career, "bayes": run_bayes, "report": run_report,
}


def run_subcommand(name, config):
    """Run one subcommand (or ``all`` for ingest through report) and return its manifest(s)."""
    if name == "all":
        return [RUNNERS[s](config) for s in PIPELINE]
    if name not in RUNNERS:
        raise UsageError(f"unknown subcommand {name!r}")
    return RUNNERS[name](config)


# ----------------------------------------------------------------------------- argv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_object(text):
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from None
    if not isinstance(value, dict):
        raise argparse.ArgumentTypeError("expected a JSON object")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with settings; command-line flags win")
    common.add_argument("--out", help="output root directory (default: prodprestige-out)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--threads", type=int, help="worker threads (results do not depend on it)")
    common.add_argument("--realizations", type=int, help="null realizations per (discipline, year, p)")
    common.add_argument("--shuffles", type=int, help="career shuffles for the transition null")
    common.add_argument("--tau", type=float, help="outlier z-score threshold")
    common.add_argument("--chains", type=int, help="MCMC chains")
    common.add_argument("--iters", type=int, help="MCMC iterations per chain, burn-in included")
    common.add_argument("--burn-in", dest="burn_in", type=int, help="MCMC burn-in iterations")
    common.add_argument("--null-replacement", dest="null_replacement", choices=["with", "without"])
    common.add_argument("--gap-policy", dest="gap_policy", choices=list(transitions.GAP_POLICIES))
    common.add_argument("--window", choices=list(career.ALIGNMENTS))
    common.add_argument("--estimator", choices=["huber", "moments"])
    common.add_argument("--min-researchers", dest="min_researchers", type=int)
    common.add_argument("--year-start", dest="year_start", type=int)
    common.add_argument("--year-end", dest="year_end", type=int)
    common.add_argument("--permutations", type=int)
    common.add_argument("--comparison-unit", dest="comparison_unit", choices=["year", "researcher"])
    common.add_argument("--bootstrap", type=int, help="bootstrap resamples for trend intervals")
    common.add_argument("--interval", type=int, help="career-interval width for occupancy matrices")
    common.add_argument("--min-interval-researchers", dest="min_interval_researchers", type=int,
                        help="researchers needed to keep an occupancy column")
    common.add_argument("--min-career-length", dest="min_career_length", type=int,
                        help="career-length cut for the hierarchical model sample")
    common.add_argument("--career-length-rule", dest="career_length_rule", choices=["strict", "inclusive"])
    common.add_argument("--normal-prior-reading", dest="normal_prior_reading", choices=["variance", "sd"])
    common.add_argument("--sigma-prior-on", dest="sigma_prior_on", choices=["sd", "variance"])
    common.add_argument("--synth", type=_json_object, help="JSON object of synthetic-corpus settings (synth)")
    common.add_argument("--publications", help="publications CSV/JSONL (ingest)")
    common.add_argument("--metrics", help="journal metrics CSV/JSONL (ingest)")
    common.add_argument("--meta", help="researcher metadata CSV/JSONL (ingest)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = _Parser(prog="prodprestige", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in [*RUNNERS, "all"]:
        sub.add_parser(name, parents=[common], help=f"run the {name} stage" if name != "all"
                       else "run ingest through report")
    return parser


def main(argv=None):
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    verbose = args.pop("verbose", False)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        run_subcommand(command, cfg)
    except UsageError as exc:
        print(f"prodprestige: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except synth.InfeasibleConfigError as exc:
        print(f"prodprestige: infeasible synth settings: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, corpus.CorpusFormatError) as exc:
        print(f"prodprestige: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (np.linalg.LinAlgError, FloatingPointError, OverflowError, ArithmeticError) as exc:
        print(f"prodprestige: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
