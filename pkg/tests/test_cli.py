import json
from pathlib import Path

import pytest

from prodprestige import cli
from prodprestige.cli import RunConfig, main, resolve_config, sha256

SYNTH = json.dumps({"n_disciplines": 2, "researchers_per_discipline": 70, "year_start": 2005, "year_end": 2012,
                    "phd_year_range": [1985, 2008]})
FAST = ["--seed", "3", "--realizations", "200", "--shuffles", "1000", "--chains", "2", "--iters", "400",
        "--burn-in", "200", "--permutations", "2000", "--bootstrap", "500"]


def _run(out):
    assert main(["synth", "--out", str(out), "--seed", "3", "--synth", SYNTH]) == 0
    assert main(["all", "--out", str(out), *FAST]) == 0
    return out


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    return _run(root / "a"), _run(root / "b")


def _data_files(root):
    return sorted(p.relative_to(root) for p in root.rglob("*")
                  if p.is_file() and p.name != "manifest.json" and p.suffix != ".svg")


def test_rerun_is_byte_identical(runs):
    a, b = runs
    files = _data_files(a)
    assert files == _data_files(b) and len(files) > 30
    for rel in files:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_manifest_chain(runs):
    a, _ = runs
    for stage, deps in cli.STAGES.items():
        m = json.loads((a / stage / "manifest.json").read_text())
        assert m["subcommand"] == stage and m["seed"] == 3
        for rel, digest in m["outputs"].items():
            assert sha256(a / rel) == digest
        for up, digest in m["upstream"].items():
            assert sha256(a / up / "manifest.json") == digest
        assert set(deps) <= set(m["upstream"])
        assert "seconds" in m["timings"]
    ingest = json.loads((a / "ingest" / "manifest.json").read_text())
    assert "synth" in ingest["upstream"]


def test_report_contents(runs):
    a, _ = runs
    names = {p.name for p in (a / "report").iterdir()}
    for fig in ("plane.svg", "logistic_curve.svg", "entropy.svg", "transitions_outlier.svg",
                "trends_D01.svg", "occupancy_D01.svg", "posterior_mu_P_without_age.svg",
                "posterior_mu_A_with_age.svg"):
        assert fig in names
    for table in ("classify_categories.csv", "career_trends.csv", "bayes_summary.csv", "transitions_outlier.csv",
                  "logistic_logistic.csv", "entropy_entropy.csv"):
        assert table in names
    header = (a / "career" / "trends.csv").read_text().splitlines()[0]
    assert header == "discipline,age,meanP,loP,hiP,meanI,loI,hiI,n"


def test_missing_artifact_names_producer(tmp_path, capsys):
    assert main(["classify", "--out", str(tmp_path)]) == cli.EXIT_DATA
    assert "run the 'normalize' subcommand first" in capsys.readouterr().err
    with pytest.raises(cli.MissingArtifactError, match="'synth'"):
        cli.run_subcommand("ingest", RunConfig(out=str(tmp_path)))


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path), "--gap-policy", "bridge", "--chains", "1"]) == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["transitions", "--gap-policy", "sideways"])
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == cli.EXIT_USAGE
    assert main(["synth", "--out", str(tmp_path), "--synth", '{"coverage": 2}']) == cli.EXIT_USAGE
    assert main(["synth", "--out", str(tmp_path), "--synth", '{"bogus": 1}']) == cli.EXIT_USAGE
    assert main(["ingest", "--out", str(tmp_path), "--publications", "x.csv"]) == cli.EXIT_USAGE
    capsys.readouterr()


def test_bad_input_is_data_error(tmp_path):
    bad = tmp_path / "pubs.csv"
    bad.write_text("who,what\n1,2\n")
    meta = tmp_path / "meta.csv"
    meta.write_text("researcher_id,discipline,phd_year\n")
    code = main(["ingest", "--out", str(tmp_path / "o"), "--publications", str(bad), "--metrics", str(bad),
                 "--meta", str(meta)])
    assert code == cli.EXIT_DATA
    assert main(["ingest", "--out", str(tmp_path / "o"), "--publications", "nope.csv", "--metrics", "nope.csv",
                 "--meta", "nope.csv"]) == cli.EXIT_DATA


def test_numerical_failure_exit_3(monkeypatch, tmp_path):
    def boom(cfg):
        raise FloatingPointError("diverged")
    monkeypatch.setitem(cli.RUNNERS, "bayes", boom)
    assert main(["bayes", "--out", str(tmp_path)]) == cli.EXIT_NUMERICAL


def test_defaults_are_published_constants():
    c = RunConfig()
    assert (c.realizations, c.shuffles, c.tau, c.chains, c.iters, c.burn_in) == (1000, 10_000, 3.5, 8, 10_000, 5000)
    assert (c.null_replacement, c.gap_policy, c.window) == ("with", "break", "centered")
    spec = c.model_spec(include_age=False)
    assert spec.prior_sd == pytest.approx(1e5 ** 0.5)


def test_config_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 5, "tau": 3.0, "gap-policy": "bridge"}))
    cfg = resolve_config({"config": str(path), "tau": 4.0})
    assert (cfg.seed, cfg.tau, cfg.gap_policy, cfg.shuffles) == (5, 4.0, "bridge", 10_000)
    path.write_text(json.dumps({"sead": 5}))
    with pytest.raises(cli.UsageError, match="sead"):
        resolve_config({"config": str(path)})
    path.write_text("[1]")
    with pytest.raises(cli.UsageError):
        resolve_config({"config": str(path)})
    with pytest.raises(cli.UsageError):
        resolve_config({"config": str(tmp_path / "missing.json")})


def test_parser_flags_reach_config(tmp_path):
    args = vars(cli.build_parser().parse_args(
        ["career", "--window", "trailing", "--interval", "10", "--min-interval-researchers", "5",
         "--null-replacement", "without", "--burn-in", "10", "--iters", "20"]))
    args.pop("command")
    cfg = resolve_config(args)
    assert (cfg.window, cfg.interval, cfg.min_interval_researchers, cfg.null_replacement) == \
        ("trailing", 10, 5, "without")
    assert cfg.out == "prodprestige-out"


def test_threads_do_not_change_outputs(runs, tmp_path):
    a, _ = runs
    c = tmp_path / "c"
    assert main(["synth", "--out", str(c), "--seed", "3", "--synth", SYNTH]) == 0
    assert main(["all", "--out", str(c), *FAST, "--threads", "4"]) == 0
    for rel in _data_files(a):
        assert (a / rel).read_bytes() == (c / rel).read_bytes(), rel
