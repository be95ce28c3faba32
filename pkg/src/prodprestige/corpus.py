"""Ingestion of publication, researcher and journal-metric tables.

File schemas (UTF-8, header row required; ``.jsonl`` files carry the same keys):

* publications: ``researcher_id,discipline,year,journal_id,doi``
* metrics: ``journal_id,year,value``
* meta: ``researcher_id,discipline,phd_year``

Malformed rows are collected in a :class:`ValidationReport` instead of aborting the load.
"""

import csv
from dataclasses import asdict, dataclass, field
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

log = logging.getLogger(__name__)

PUBLICATION_COLUMNS = ("researcher_id", "discipline", "year", "journal_id", "doi")
METRIC_COLUMNS = ("journal_id", "year", "value")
META_COLUMNS = ("researcher_id", "discipline", "phd_year")
CAREER_COLUMNS = ("discipline", "researcher_id", "year", "phd_year", "A", "p", "i")


class CorpusFormatError(ValueError):
    """A file that cannot be read as the documented schema at all."""


@dataclass
class ValidationReport:
    source: str
    n_rows: int = 0
    n_accepted: int = 0
    rejections: list = field(default_factory=list)

    def reject(self, line, reason):
        self.rejections.append({"line": line, "reason": reason})

    def to_dict(self):
        return asdict(self)

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def _iter_rows(path, columns):
    """Yield (line_number, dict) from a CSV or JSON Lines file."""
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"{path}: no such file")
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError:
                    yield lineno, None
                    continue
                yield lineno, row if isinstance(row, dict) else None
        return
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CorpusFormatError(f"{path}: empty file") from None
        except csv.Error as exc:
            raise CorpusFormatError(f"{path}: {exc}") from None
        missing = [c for c in columns if c not in header and c != "doi"]
        if missing:
            raise CorpusFormatError(f"{path}: header lacks column(s) {', '.join(missing)}")
        try:
            for values in reader:
                lineno = reader.line_num
                if not values:
                    continue
                if len(values) != len(header):
                    yield lineno, None
                    continue
                yield lineno, dict(zip(header, values))
        except csv.Error as exc:
            raise CorpusFormatError(f"{path}: {exc}") from None


def _text(row, key):
    value = row.get(key)
    return "" if value is None else str(value).strip()


def _int(row, key):
    value = row.get(key)
    if isinstance(value, bool):
        raise ValueError(key)
    if isinstance(value, (int, np.integer)):
        return int(value)
    text = "" if value is None else str(value).strip()
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return int(text)


def load_publications(path, year_range=None):
    """Read a publications file.

    Returns
    -------
    records : DataFrame
        Columns ``researcher_id, discipline, year, journal_id, doi`` in file order.
    report : ValidationReport
    """
    report = ValidationReport(str(path))
    rows = []
    for lineno, row in _iter_rows(path, PUBLICATION_COLUMNS):
        report.n_rows += 1
        if row is None:
            report.reject(lineno, "unparseable row")
            continue
        rid, disc, jid = _text(row, "researcher_id"), _text(row, "discipline"), _text(row, "journal_id")
        empty = [k for k, v in (("researcher_id", rid), ("discipline", disc), ("journal_id", jid)) if not v]
        if empty:
            report.reject(lineno, "empty " + ", ".join(empty))
            continue
        try:
            year = _int(row, "year")
        except (TypeError, ValueError):
            report.reject(lineno, "year is not an integer")
            continue
        if year_range is not None and not year_range[0] <= year <= year_range[1]:
            report.reject(lineno, f"year {year} outside {year_range[0]}-{year_range[1]}")
            continue
        rows.append((rid, disc, year, jid, _text(row, "doi")))
    report.n_accepted = len(rows)
    frame = pd.DataFrame(rows, columns=list(PUBLICATION_COLUMNS))
    frame["year"] = frame["year"].astype(np.int64)
    return frame, report


def load_meta(path):
    """Read the researcher table; phd_year is the career-age origin."""
    report = ValidationReport(str(path))
    rows = []
    seen = set()
    for lineno, row in _iter_rows(path, META_COLUMNS):
        report.n_rows += 1
        if row is None:
            report.reject(lineno, "unparseable row")
            continue
        rid, disc = _text(row, "researcher_id"), _text(row, "discipline")
        if not rid or not disc:
            report.reject(lineno, "empty researcher_id or discipline")
            continue
        try:
            phd = _int(row, "phd_year")
        except (TypeError, ValueError):
            report.reject(lineno, "phd_year is not an integer")
            continue
        if rid in seen:
            report.reject(lineno, f"duplicate researcher_id {rid}")
            continue
        seen.add(rid)
        rows.append((rid, disc, phd))
    report.n_accepted = len(rows)
    frame = pd.DataFrame(rows, columns=list(META_COLUMNS))
    frame["phd_year"] = frame["phd_year"].astype(np.int64)
    return frame, report


def load_metrics(path):
    """Read a journal-metric table keyed by (journal_id, year)."""
    report = ValidationReport(str(path))
    rows = []
    seen = set()
    for lineno, row in _iter_rows(path, METRIC_COLUMNS):
        report.n_rows += 1
        if row is None:
            report.reject(lineno, "unparseable row")
            continue
        jid = _text(row, "journal_id")
        if not jid:
            report.reject(lineno, "empty journal_id")
            continue
        try:
            year = _int(row, "year")
            value = float(row.get("value"))
        except (TypeError, ValueError):
            report.reject(lineno, "year or value not numeric")
            continue
        if not np.isfinite(value) or value < 0:
            report.reject(lineno, "value must be a finite non-negative number")
            continue
        if (jid, year) in seen:
            report.reject(lineno, f"duplicate key ({jid}, {year})")
            continue
        seen.add((jid, year))
        rows.append((jid, year, value))
    report.n_accepted = len(rows)
    frame = pd.DataFrame(rows, columns=list(METRIC_COLUMNS))
    frame["year"] = frame["year"].astype(np.int64)
    return frame, report


def check_phd_years(records, meta, tolerance=0):
    """Researchers whose PhD year is later than their first publication year + tolerance."""
    first = records.groupby("researcher_id")["year"].min().rename("first_year")
    merged = meta.set_index("researcher_id").join(first, how="inner")
    bad = merged[merged["phd_year"] > merged["first_year"] + tolerance]
    return sorted(bad.index)


@dataclass
class JoinResult:
    records: pd.DataFrame
    n_total: int
    n_matched: int
    n_duplicates: int

    @property
    def match_rate(self):
        return self.n_matched / self.n_total if self.n_total else float("nan")


def deduplicate(records):
    """Drop repeated (researcher_id, doi) rows; rows without a DOI are never merged."""
    has_doi = records["doi"].fillna("").astype(str).str.len() > 0
    dup = has_doi & records.duplicated(subset=["researcher_id", "doi"], keep="first")
    return records.loc[~dup].reset_index(drop=True), int(dup.sum())


def join_metrics(records, table):
    """Annotate each record with the metric of its journal in its publication year.

    The join is exact on ``(journal_id, year)``; records without a match carry NaN.
    """
    unique, n_dup = deduplicate(records)
    keyed = table[["journal_id", "year", "value"]].rename(columns={"value": "metric"})
    out = unique.merge(keyed, on=["journal_id", "year"], how="left", validate="many_to_one")
    n_matched = int(out["metric"].notna().sum())
    return JoinResult(out, len(out), n_matched, n_dup)


def build_career_years(annotated, meta):
    """Collapse matched articles into one row per (discipline, researcher, year).

    ``p`` counts the matched articles, ``i`` is their mean metric and ``A`` is the
    year minus the PhD year. Researchers absent from ``meta`` are dropped with a warning.
    """
    if isinstance(annotated, JoinResult):
        annotated = annotated.records
    matched = annotated[annotated["metric"].notna()]
    phd = meta.set_index("researcher_id")["phd_year"]
    known = matched["researcher_id"].isin(phd.index)
    if not known.all():
        missing = sorted(matched.loc[~known, "researcher_id"].unique())
        log.warning("dropping %d articles of %d researchers missing from meta: %s",
                    int((~known).sum()), len(missing), ", ".join(missing[:10]))
        matched = matched[known]
    grouped = (matched.groupby(["discipline", "researcher_id", "year"], sort=True)["metric"]
               .agg(p="size", i="mean").reset_index())
    grouped["phd_year"] = grouped["researcher_id"].map(phd).astype(np.int64)
    grouped["A"] = grouped["year"] - grouped["phd_year"]
    grouped["p"] = grouped["p"].astype(np.int64)
    return grouped[list(CAREER_COLUMNS)].reset_index(drop=True)


def filter_disciplines(career_years, min_researchers=50, year_range=None):
    """Keep disciplines with at least ``min_researchers`` active researchers in every year.

    Returns the filtered table and a per-discipline report
    ``{discipline: {"kept", "min_active", "failing_years"}}``.
    """
    if min_researchers < 1:
        raise ValueError("min_researchers must be >= 1")
    cy = career_years
    if year_range is None:
        if cy.empty:
            return cy.copy(), {}
        year_range = (int(cy["year"].min()), int(cy["year"].max()))
    years = np.arange(year_range[0], year_range[1] + 1)
    in_range = cy[(cy["year"] >= year_range[0]) & (cy["year"] <= year_range[1])]
    active = (in_range.groupby(["discipline", "year"])["researcher_id"].nunique()
              .unstack("year").reindex(columns=years).fillna(0).astype(int))
    report = {}
    kept = []
    for disc in sorted(cy["discipline"].unique()):
        counts = active.loc[disc] if disc in active.index else pd.Series(0, index=years)
        failing = [int(y) for y in years if counts[y] < min_researchers]
        report[disc] = {"kept": not failing, "min_active": int(counts.min()), "failing_years": failing}
        if not failing:
            kept.append(disc)
    if not kept:
        log.warning("no discipline has %d active researchers in every year %s-%s",
                    min_researchers, *year_range)
    out = cy[cy["discipline"].isin(kept)].reset_index(drop=True)
    return out, report


@dataclass(frozen=True)
class InflationTrend:
    p_slope: float
    p_se: float
    i_slope: float
    i_se: float
    n_years: int


def inflation_trend(career_years, discipline=None):
    """OLS slope of the yearly mean of p and of i against calendar year, per decade."""
    cy = career_years
    if discipline is not None:
        cy = cy[cy["discipline"] == discipline]
    yearly = cy.groupby("year")[["p", "i"]].mean()
    if len(yearly) < 2:
        raise ValueError("inflation trend needs at least two distinct years")
    x = yearly.index.to_numpy(dtype=float)
    fits = {}
    for col in ("p", "i"):
        y = yearly[col].to_numpy(dtype=float)
        if len(yearly) == 2:
            slope = (y[1] - y[0]) / (x[1] - x[0])
            fits[col] = (slope, float("nan"))
        else:
            res = stats.linregress(x, y)
            fits[col] = (res.slope, res.stderr)
    return InflationTrend(10 * fits["p"][0], 10 * fits["p"][1],
                          10 * fits["i"][0], 10 * fits["i"][1], len(yearly))


def write_table(frame, path):
    """Write a frame as CSV or JSON Lines depending on the suffix."""
    path = Path(path)
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        frame.to_json(path, orient="records", lines=True)
    else:
        frame.to_csv(path, index=False, lineterminator="\n")
