import pytest

from prodprestige import synth

from helpers import run_library_pipeline

SMALL = dict(n_disciplines=2, researchers_per_discipline=70, year_start=2005, year_end=2012,
             phd_year_range=(1985, 2008), seed=3)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A two-discipline synthetic corpus written to disk and pushed through ingest,
    normalization and classification with the library API."""
    sc = synth.generate_corpus(**SMALL)
    result = run_library_pipeline(sc)
    result.paths = sc.write(tmp_path_factory.mktemp("small"))
    return result


ACCEPTANCE = {}


@pytest.fixture
def accept():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(criterion, passed, detail):
        line = f"acceptance {criterion:<8} {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[criterion] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split("-")[0]), k)):
            terminalreporter.write_line(ACCEPTANCE[key])
