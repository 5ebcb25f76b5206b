"""Monte-Carlo experiment runner.

A run is (algorithm x family x n list x trials).  Trial t at size n draws its
graph from ``make_rng(seed, t, "graph/<n>")`` and its algorithm randomness
from ``make_rng(seed, t, "alg/<n>")``, so results do not depend on how
trials are spread over workers.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import families as fam
from . import generators as gen
from .general import GeneralPlanConfig, run_general
from .graph import NONE, FindOutcome, HiddenGraph, VertexSet, outcome_correct, read_graph
from .oracle import OracleSession
from .rng import make_rng
from .rounds import (
    binary_search_rounds,
    det_rounds_budget,
    rand_rounds_budget,
    run_binary_search,
    run_det_rounds,
    run_rand_rounds,
)
from .single_edge import build_explicit, build_randomized, decode_explicit, decode_randomized

GENERAL = "general"
SINGLE_EDGE = "single_edge"
STAR = "star"
OP = "overlapping_product"
CLIQUE = "clique"
MATCHING = "matching"

REPORT_COLUMNS = ("n", "success_rate", "wrong_pair_rate", "queries_mean", "queries_max", "rounds_max", "budget_ok")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# -------------------------------------------------------------- algorithms


def _log2(n: int) -> float:
    return math.log2(n) if n > 1 else 0.0


def _clog2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def _run_single(session, c, r, rng, build, decode):
    if session.n < 2:
        return NONE
    plan = build(VertexSet.full(session.n))
    return decode(plan, session.submit_round(plan.round()).values)


def _alg_general(session, c, r, rng):
    return run_general(session, c, rng)


def _alg_single_randomized(session, c, r, rng):
    return _run_single(session, c, r, rng, lambda s: build_randomized(s, rng), decode_randomized)


def _alg_single_explicit(session, c, r, rng):
    return _run_single(session, c, r, rng, build_explicit, decode_explicit)


def _alg_op(session, c, r, rng):
    return fam.run_overlapping_product(session)


def _alg_clique_det(session, c, r, rng):
    return fam.run_clique_det(session)


def _alg_clique_rand(session, c, r, rng):
    return fam.run_clique_rand(session, c, rng)


def _alg_matching_det(session, c, r, rng):
    return fam.run_matching_det(session)


def _alg_matching_rand(session, c, r, rng):
    return fam.run_matching_rand(session, c, rng)


def _alg_det_rounds(session, c, r, rng):
    return run_det_rounds(session, r)


def _alg_rand_rounds(session, c, r, rng):
    return run_rand_rounds(session, r, c, rng)


def _alg_binary_search(session, c, r, rng):
    return run_binary_search(session)


def _alg_all_pairs(session, c, r, rng):
    return run_det_rounds(session, 1)


@dataclass(frozen=True)
class Algorithm:
    name: str
    domain: str
    budget_formula: str
    budget: Callable[[int, float, int], float]
    rounds: Callable[[int, int], int]
    run: Callable
    uses_r: bool = False
    randomized: bool = False


def _general_budget(n, c, r):
    return GeneralPlanConfig(max(n, 1), c).budget


ALGORITHMS: dict[str, Algorithm] = {
    a.name: a
    for a in (
        Algorithm("general_nonadaptive", GENERAL, "c*500*n*log2(n)^3", _general_budget, lambda n, r: 1, _alg_general, randomized=True),
        Algorithm(
            "single_edge_randomized",
            SINGLE_EDGE,
            "1 + ceil(24 ln n)",
            lambda n, c, r: 1 + math.ceil(24 * math.log(n)) if n > 1 else 0,
            lambda n, r: 1,
            _alg_single_randomized,
            randomized=True,
        ),
        Algorithm(
            "single_edge_explicit",
            SINGLE_EDGE,
            "4*ceil(log2(n+1)) + 1",
            lambda n, c, r: 4 * _clog2(n + 1) + 1,
            lambda n, r: 1,
            _alg_single_explicit,
        ),
        Algorithm("overlapping_product", OP, "n*ceil(log2 n)", lambda n, c, r: fam.op_query_bound(n), lambda n, r: 1, _alg_op),
        Algorithm("clique_det", CLIQUE, "3n", lambda n, c, r: 3 * n, lambda n, r: 1, _alg_clique_det),
        Algorithm("clique_rand", CLIQUE, "c*500*log2(n)^3", lambda n, c, r: c * 500 * _log2(n) ** 3, lambda n, r: 1, _alg_clique_rand, randomized=True),
        Algorithm(
            "matching_det",
            MATCHING,
            "f(n) = f(ceil(n/2)) + f(floor(n/2)) + floor(n/2)*g(ceil(n/2))",
            lambda n, c, r: fam.matching_recurrence(n),
            lambda n, r: 1,
            _alg_matching_det,
        ),
        Algorithm(
            "matching_rand", MATCHING, "c*500*log2(n)^3", lambda n, c, r: c * 500 * _log2(n) ** 3, lambda n, r: 1, _alg_matching_rand, randomized=True
        ),
        Algorithm("det_rounds", GENERAL, "10*r*n^(2/r)", lambda n, c, r: det_rounds_budget(n, r), lambda n, r: r, _alg_det_rounds, uses_r=True),
        Algorithm(
            "rand_rounds",
            GENERAL,
            "2000*c*r*n^(1/r)*ln(n)^3",
            lambda n, c, r: rand_rounds_budget(n, r, c),
            lambda n, r: r,
            _alg_rand_rounds,
            uses_r=True,
            randomized=True,
        ),
        Algorithm(
            "binary_search",
            GENERAL,
            "6*ceil(log2 n)",
            lambda n, c, r: 6 * max(1, _clog2(n)),
            lambda n, r: max(1, _clog2(n)),
            _alg_binary_search,
        ),
        Algorithm("all_pairs", GENERAL, "n(n-1)/2", lambda n, c, r: n * (n - 1) // 2, lambda n, r: 1, _alg_all_pairs),
    )
}


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class Family:
    name: str
    contains: frozenset[str]
    description: str


_ALL_DOMAINS = frozenset({GENERAL, SINGLE_EDGE, STAR, OP, CLIQUE, MATCHING})

FAMILIES: dict[str, Family] = {
    f.name: f
    for f in (
        Family("empty", _ALL_DOMAINS, "no edges"),
        Family("planted_single_edge", _ALL_DOMAINS, "one uniformly random edge"),
        Family("complete", frozenset({GENERAL, OP, CLIQUE}), "K_n"),
        Family("clique", frozenset({GENERAL, OP, CLIQUE}), "clique on a random k-subset (--clique-size)"),
        Family("star", frozenset({GENERAL, OP, STAR}), "random centre with --star-degree random leaves"),
        Family("hard_star", frozenset({GENERAL, OP, STAR}), "random centre, each leaf with probability 1/log2 n"),
        Family("matching", frozenset({GENERAL, MATCHING}), "uniform matching with --matching-size edges"),
        Family("overlapping_product", frozenset({GENERAL, OP}), "A x B for random A, B of size --op-size"),
        Family("gnp", frozenset({GENERAL}), "Erdos-Renyi G(n, --edge-prob)"),
        Family("file", frozenset({GENERAL}), "graph read from --graph"),
    )
}
FAMILY_ALIASES = {"single_edge": "planted_single_edge"}


def soundness_ok(algorithm: str, family: str) -> bool:
    return ALGORITHMS[algorithm].domain in FAMILIES[family].contains


# ------------------------------------------------------------------ config


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    family: str
    n: tuple[int, ...]
    trials: int
    c: float = 1.0
    r: Optional[int] = None
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"
    force: bool = False
    clique_size: Optional[int] = None
    matching_size: Optional[int] = None
    star_degree: Optional[int] = None
    edge_prob: Optional[float] = None
    op_size: Optional[int] = None
    graph: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", FAMILY_ALIASES.get(self.family, self.family))
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(ALGORITHMS)}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.n or min(self.n) < 1:
            raise ConfigError("every n must be at least 1")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        alg = ALGORITHMS[self.algorithm]
        if alg.uses_r:
            if self.r is None:
                object.__setattr__(self, "r", 2)
            if self.r < 1:
                raise ConfigError("r must be at least 1")
        if self.family == "file":
            if self.graph is None:
                raise ConfigError("family 'file' needs --graph")
            g = _load_graph(self.graph)
            if set(self.n) != {g.n}:
                raise ConfigError(f"{self.graph} has n={g.n}, but n={list(self.n)} was requested")
        if not self.force and not soundness_ok(self.algorithm, self.family):
            raise ConfigError(
                f"{self.algorithm} is only sound for {alg.domain} graphs; family {self.family!r} is not one (use --force)"
            )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n"] = list(self.n)
        return d


@lru_cache(maxsize=4)
def _load_graph(path: str) -> HiddenGraph:
    return read_graph(path)


def make_graph(cfg: ExperimentConfig, n: int, rng: np.random.Generator) -> HiddenGraph:
    f = cfg.family
    if f == "empty":
        return gen.empty_graph(n)
    if f == "planted_single_edge":
        return gen.planted_edge(n, rng)
    if f == "complete":
        return _complete(n)
    if f == "clique":
        return gen.planted_clique(n, cfg.clique_size if cfg.clique_size is not None else gen.default_clique_size(n), rng)
    if f == "star":
        return gen.planted_star(n, cfg.star_degree if cfg.star_degree is not None else gen.default_star_degree(n), rng)
    if f == "hard_star":
        return gen.hard_star(n, rng)
    if f == "matching":
        return gen.random_matching(n, cfg.matching_size if cfg.matching_size is not None else gen.default_matching_size(n), rng)
    if f == "overlapping_product":
        size = cfg.op_size if cfg.op_size is not None else max(1, math.isqrt(n))
        return gen.random_overlapping_product(n, size, size, rng)
    if f == "gnp":
        return gen.gnp(n, cfg.edge_prob if cfg.edge_prob is not None else min(1.0, 2.0 / n), rng)
    return _load_graph(cfg.graph)


@lru_cache(maxsize=4)
def _complete(n: int) -> HiddenGraph:
    return gen.complete_graph(n)


# ----------------------------------------------------------------- records


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial: int
    outcome: str
    edge: Optional[tuple[int, int]]
    correct: bool
    wrong_pair: bool
    queries_used: int
    rounds_used: int
    wall_time: float = field(compare=False)


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    graph = make_graph(cfg, n, make_rng(cfg.seed, trial, f"graph/{n}"))
    alg = ALGORITHMS[cfg.algorithm]
    session = OracleSession(graph, max_rounds=alg.rounds(n, cfg.r or 1))
    start = time.perf_counter()
    out: FindOutcome = alg.run(session, cfg.c, cfg.r, make_rng(cfg.seed, trial, f"alg/{n}"))
    elapsed = time.perf_counter() - start
    session.close()
    edge = (out.edge.u, out.edge.v) if out.is_found else None
    return TrialRecord(
        n=n,
        trial=trial,
        outcome=out.status.value,
        edge=edge,
        correct=outcome_correct(out, graph),
        wrong_pair=out.is_found and not graph.contains(out.edge),
        queries_used=session.queries_used,
        rounds_used=session.rounds_used,
        wall_time=elapsed,
    )


def _run_chunk(args) -> list[TrialRecord]:
    cfg, n, trials = args
    return [run_trial(cfg, n, t) for t in trials]


def worker_count() -> int:
    raw = os.environ.get("HIDDEN_EDGE_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"HIDDEN_EDGE_THREADS={raw!r} is not an integer") from exc
        return max(1, value)
    return max(1, os.cpu_count() or 1)


# ------------------------------------------------------------------ report


@dataclass
class Report:
    config: dict
    per_n: list[dict]
    records: list[TrialRecord] = field(default_factory=list, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {"config": self.config, "per_n": self.per_n}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(config=d["config"], per_n=d["per_n"])

    @property
    def budget_ok(self) -> bool:
        return all(row["budget_ok"] for row in self.per_n)


def aggregate(cfg: ExperimentConfig, n: int, records: list[TrialRecord]) -> dict:
    alg = ALGORITHMS[cfg.algorithm]
    k = len(records)
    queries = np.array([r.queries_used for r in records], dtype=np.int64)
    rounds = np.array([r.rounds_used for r in records], dtype=np.int64)
    qmax = int(queries.max()) if k else 0
    rmax = int(rounds.max()) if k else 0
    budget = alg.budget(n, cfg.c, cfg.r or 1)
    return {
        "n": n,
        "success_rate": sum(r.correct for r in records) / k if k else 0.0,
        "wrong_pair_rate": sum(r.wrong_pair for r in records) / k if k else 0.0,
        "queries_mean": float(queries.mean()) if k else 0.0,
        "queries_max": qmax,
        "rounds_max": rmax,
        "budget_ok": bool(qmax <= budget and rmax <= alg.rounds(n, cfg.r or 1)),
    }


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> Report:
    workers = worker_count() if workers is None else max(1, workers)
    jobs = []
    for n in cfg.n:
        step = max(1, math.ceil(cfg.trials / (4 * workers)))
        for lo in range(0, cfg.trials, step):
            jobs.append((cfg, n, range(lo, min(cfg.trials, lo + step))))
    if workers == 1 or len(jobs) == 1:
        chunks = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    records = [r for chunk in chunks for r in chunk]
    per_n = [aggregate(cfg, n, [r for r in records if r.n == n]) for n in cfg.n]
    return Report(cfg.to_dict(), per_n, records)


def report_bytes(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in report.per_n:
            writer.writerow([_csv_value(row[c]) for c in REPORT_COLUMNS])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _csv_value(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(x) if isinstance(x, float) else x


def write_report(report: Report, path, fmt: str = "json") -> None:
    data = report_bytes(report, fmt)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def read_report(path) -> Report:
    with open(path, encoding="utf-8") as fh:
        return Report.from_dict(json.load(fh))
