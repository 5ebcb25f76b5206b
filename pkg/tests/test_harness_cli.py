import csv
import dataclasses
import io
import json

import pytest

from hidden_edge import HiddenGraph, write_graph
from hidden_edge.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_OK, main
from hidden_edge.harness import (
    ALGORITHMS,
    FAMILIES,
    REPORT_COLUMNS,
    ConfigError,
    ExperimentConfig,
    Report,
    read_report,
    report_bytes,
    run_experiment,
    run_trial,
    soundness_ok,
    worker_count,
    write_report,
)


def cfg(**kw):
    base = dict(algorithm="general_nonadaptive", family="planted_single_edge", n=(32,), trials=5, seed=1)
    base.update(kw)
    return ExperimentConfig(**base)


# ------------------------------------------------------------- experiments


def test_general_on_planted_edges_at_64():
    rep = run_experiment(cfg(n=(64,), trials=200, seed=7), workers=1)
    row = rep.per_n[0]
    assert row["success_rate"] >= 0.99
    assert row["wrong_pair_rate"] == 0.0
    assert row["budget_ok"]


def test_clique_det_on_a_five_clique_at_100():
    rep = run_experiment(cfg(algorithm="clique_det", family="clique", clique_size=5, n=(100,), trials=1), workers=1)
    row = rep.per_n[0]
    assert row["success_rate"] == 1.0
    assert row["queries_max"] <= 300


@pytest.mark.parametrize(
    "bad",
    [
        dict(trials=0),
        dict(algorithm="nope"),
        dict(family="nope"),
        dict(n=()),
        dict(n=(0,)),
        dict(c=0.0),
        dict(seed=-1),
        dict(format="xml"),
        dict(algorithm="det_rounds", r=0),
        dict(family="file"),
    ],
)
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        cfg(**bad)


def test_soundness_mismatch_is_an_error_unless_forced():
    with pytest.raises(ConfigError):
        cfg(algorithm="clique_det", family="matching")
    forced = cfg(algorithm="clique_det", family="matching", force=True)
    assert forced.force
    run_experiment(forced, workers=1)


def test_soundness_table():
    assert soundness_ok("general_nonadaptive", "gnp")
    assert soundness_ok("overlapping_product", "hard_star")
    assert soundness_ok("overlapping_product", "clique")
    assert not soundness_ok("matching_det", "star")
    for alg in ALGORITHMS:
        assert soundness_ok(alg, "empty") and soundness_ok(alg, "planted_single_edge")


def test_round_limited_algorithms_default_to_two_rounds():
    assert cfg(algorithm="det_rounds").r == 2


def test_trial_streams_are_independent_of_order():
    c = cfg(n=(40,), trials=6)
    forward = [run_trial(c, 40, t) for t in range(6)]
    backward = [run_trial(c, 40, t) for t in reversed(range(6))][::-1]
    assert forward == backward


def test_empty_graph_counts_as_success_for_none():
    rep = run_experiment(cfg(family="empty", n=(20,), trials=3), workers=1)
    assert rep.per_n[0]["success_rate"] == 1.0


def test_wrong_pairs_are_reported_not_folded_into_success():
    rep = run_experiment(cfg(algorithm="clique_det", family="gnp", edge_prob=0.3, n=(12,), trials=40, force=True), workers=1)
    row = rep.per_n[0]
    wrong = sum(r.wrong_pair for r in rep.records)
    assert row["wrong_pair_rate"] == wrong / 40
    assert row["success_rate"] == sum(r.correct for r in rep.records) / 40
    assert all(not (r.wrong_pair and r.correct) for r in rep.records)


def test_file_family(tmp_path):
    path = tmp_path / "g.txt"
    write_graph(HiddenGraph(10, [(2, 7)]), path)
    rep = run_experiment(cfg(family="file", graph=str(path), n=(10,), trials=3), workers=1)
    assert rep.per_n[0]["success_rate"] == 1.0
    with pytest.raises(ConfigError):
        cfg(family="file", graph=str(path), n=(11,))


@pytest.mark.parametrize("alg", sorted(ALGORITHMS))
def test_every_algorithm_runs_within_budget_on_its_own_family(alg):
    domain = ALGORITHMS[alg].domain
    family = {"general": "planted_single_edge", "single_edge": "planted_single_edge", "star": "star"}.get(domain, domain)
    family = {"overlapping_product": "overlapping_product", "clique": "clique", "matching": "matching"}.get(family, family)
    rep = run_experiment(cfg(algorithm=alg, family=family, n=(16, 33), trials=4), workers=1)
    assert rep.budget_ok, rep.per_n


# ------------------------------------------------------------- reports


def test_json_round_trip(tmp_path):
    rep = run_experiment(cfg(), workers=1)
    path = tmp_path / "r.json"
    write_report(rep, path, "json")
    back = read_report(path)
    assert back == rep
    assert set(back.per_n[0]) == set(REPORT_COLUMNS)


def test_csv_header_and_column_order(tmp_path):
    rep = run_experiment(cfg(n=(16, 24)), workers=1)
    path = tmp_path / "r.csv"
    write_report(rep, path, "csv")
    rows = list(csv.reader(io.StringIO(path.read_text())))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert [int(r[0]) for r in rows[1:]] == [16, 24]


def test_empty_report_is_still_valid():
    rep = Report(config={}, per_n=[])
    assert report_bytes(rep, "csv").decode().splitlines() == [",".join(REPORT_COLUMNS)]
    assert json.loads(report_bytes(rep, "json"))["per_n"] == []


def test_unwritable_path_names_the_path(tmp_path):
    rep = run_experiment(cfg(), workers=1)
    target = tmp_path / "missing" / "r.json"
    with pytest.raises(OSError, match="missing"):
        write_report(rep, target)


def test_reports_are_identical_across_worker_counts():
    c = cfg(algorithm="rand_rounds", family="star", n=(30, 50), trials=12, r=2)
    one = report_bytes(run_experiment(c, workers=1), "json")
    three = report_bytes(run_experiment(c, workers=3), "json")
    assert one == three


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("HIDDEN_EDGE_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("HIDDEN_EDGE_THREADS", "x")
    with pytest.raises(ConfigError):
        worker_count()


# ------------------------------------------------------------- cli


def test_cli_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in list(ALGORITHMS) + list(FAMILIES):
        assert name in out
    assert "10*r*n^(2/r)" in out


def test_cli_run_writes_report(tmp_path, capsys):
    path = tmp_path / "out.json"
    code = main(["run", "--algorithm", "binary_search", "--family", "planted_single_edge", "--n", "16,32", "--trials", "3", "--output", str(path)])
    assert code == EXIT_OK
    data = json.loads(path.read_text())
    assert [row["n"] for row in data["per_n"]] == [16, 32]
    assert "binary_search" in capsys.readouterr().out


def test_cli_run_to_stdout_in_csv(capsys):
    code = main(["run", "--algorithm", "all_pairs", "--family", "gnp", "--n", "8", "--trials", "2", "--format", "csv"])
    assert code == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == ",".join(REPORT_COLUMNS)


def test_cli_errors_exit_two(capsys, tmp_path):
    assert main(["run", "--algorithm", "clique_det", "--family", "matching", "--n", "8", "--trials", "1"]) == EXIT_ERROR
    assert "--force" in capsys.readouterr().err
    assert main(["run", "--algorithm", "all_pairs", "--family", "gnp", "--n", "8", "--trials", "0"]) == EXIT_ERROR
    bad = tmp_path / "nope" / "x.json"
    assert main(["run", "--algorithm", "all_pairs", "--family", "gnp", "--n", "8", "--trials", "1", "--output", str(bad)]) == EXIT_ERROR


def test_cli_exit_one_when_budget_is_broken(monkeypatch, capsys):
    from hidden_edge import harness

    tight = dataclasses.replace(harness.ALGORITHMS["all_pairs"], budget=lambda n, c, r: 0)
    monkeypatch.setitem(harness.ALGORITHMS, "all_pairs", tight)
    code = main(["run", "--algorithm", "all_pairs", "--family", "gnp", "--n", "8", "--trials", "1", "--threads", "1"])
    assert code == EXIT_BUDGET


def test_cli_sweep(capsys):
    code = main(["sweep", "--algorithm", "clique_rand", "--family", "clique", "--n", "16", "--c", "0.5,1", "--trials", "2", "--format", "csv"])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "c," + ",".join(REPORT_COLUMNS)
    assert [line.split(",")[0] for line in lines[1:3]] == ["0.5", "1.0"]


def test_cli_is_byte_reproducible(tmp_path, capsys):
    path = tmp_path / "r.json"
    blobs = []
    for threads in ("1", "2"):
        argv = ["run", "--algorithm", "general_nonadaptive", "--family", "hard_star", "--n", "32", "--trials", "6"]
        main(argv + ["--seed", "3", "--threads", threads, "--output", str(path)])
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]
