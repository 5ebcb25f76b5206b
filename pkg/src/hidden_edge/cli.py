"""Command line entry point: ``hidden-edge run | list | sweep``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .harness import (
    ALGORITHMS,
    FAMILIES,
    REPORT_COLUMNS,
    ConfigError,
    ExperimentConfig,
    Report,
    report_bytes,
    run_experiment,
    write_report,
)

EXIT_OK = 0
EXIT_BUDGET = 1
EXIT_ERROR = 2


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--family", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--r", type=int, default=None, help="round budget for round-limited algorithms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--force", action="store_true", help="run even if the family is outside the algorithm's domain")
    p.add_argument("--clique-size", type=int, default=None)
    p.add_argument("--matching-size", type=int, default=None)
    p.add_argument("--star-degree", type=int, default=None)
    p.add_argument("--edge-prob", type=float, default=None)
    p.add_argument("--op-size", type=int, default=None)
    p.add_argument("--graph", default=None, help="graph file for --family file")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: HIDDEN_EDGE_THREADS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hidden-edge", description="Edge-finding experiments under independent-set queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    _add_common(run)
    run.add_argument("--n", type=_int_list, required=True, help="vertex counts, e.g. 64,128")
    run.add_argument("--c", type=float, default=1.0)

    sub.add_parser("list", help="show algorithms and families")

    sweep = sub.add_parser("sweep", help="cartesian product over n and c")
    _add_common(sweep)
    sweep.add_argument("--n", type=_int_list, required=True)
    sweep.add_argument("--c", type=_float_list, default=[1.0])
    return parser


def _config(args, n, c) -> ExperimentConfig:
    return ExperimentConfig(
        algorithm=args.algorithm,
        family=args.family,
        n=tuple(n),
        trials=args.trials,
        c=c,
        r=args.r,
        seed=args.seed,
        output=args.output,
        format=args.format,
        force=args.force,
        clique_size=args.clique_size,
        matching_size=args.matching_size,
        star_degree=args.star_degree,
        edge_prob=args.edge_prob,
        op_size=args.op_size,
        graph=args.graph,
    )


def _summary(report: Report, out) -> None:
    cfg = report.config
    print(f"# {cfg['algorithm']} on {cfg['family']}, c={cfg['c']}, r={cfg['r']}, trials={cfg['trials']}, seed={cfg['seed']}", file=out)
    print("  ".join(f"{c:>15}" for c in REPORT_COLUMNS), file=out)
    for row in report.per_n:
        cells = []
        for c in REPORT_COLUMNS:
            v = row[c]
            cells.append(f"{v:>15.6g}" if isinstance(v, float) else f"{str(v):>15}")
        print("  ".join(cells), file=out)


def _cmd_list(out) -> int:
    print("algorithms:", file=out)
    for a in ALGORITHMS.values():
        kind = "randomized" if a.randomized else "deterministic"
        print(f"  {a.name:<24} domain={a.domain:<20} budget={a.budget_formula}  ({kind})", file=out)
    print("families:", file=out)
    for f in FAMILIES.values():
        print(f"  {f.name:<24} in={','.join(sorted(f.contains)):<60} {f.description}", file=out)
    return EXIT_OK


def _cmd_run(args, out, err) -> int:
    cfg = _config(args, args.n, args.c)
    report = run_experiment(cfg, workers=args.threads)
    if args.output:
        write_report(report, args.output, args.format)
        _summary(report, out)
    else:
        out.write(report_bytes(report, args.format).decode())
        _summary(report, err)
    return EXIT_OK if report.budget_ok else EXIT_BUDGET


def _cmd_sweep(args, out, err) -> int:
    reports = []
    for c in args.c:
        cfg = _config(args, args.n, c)
        reports.append(run_experiment(cfg, workers=args.threads))
    if args.format == "json":
        data = (json.dumps({"runs": [r.to_dict() for r in reports]}, indent=2) + "\n").encode()
    else:
        lines = ["c," + ",".join(REPORT_COLUMNS)]
        for r in reports:
            body = report_bytes(r, "csv").decode().splitlines()[1:]
            lines.extend(f"{r.config['c']!r},{line}" for line in body)
        data = ("\n".join(lines) + "\n").encode()
    if args.output:
        try:
            with open(args.output, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise OSError(f"cannot write report to {args.output}: {exc.strerror or exc}") from exc
    else:
        out.write(data.decode())
    for r in reports:
        _summary(r, err if not args.output else out)
    return EXIT_OK if all(r.budget_ok for r in reports) else EXIT_BUDGET


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out, err = sys.stdout, sys.stderr
    try:
        if args.command == "list":
            return _cmd_list(out)
        if args.command == "run":
            return _cmd_run(args, out, err)
        return _cmd_sweep(args, out, err)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
