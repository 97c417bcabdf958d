"""Command-line entry point: ``treeca <subcommand> ...``.

Exit status: 0 on success, 1 when a property suite finds a failure, 2 on usage,
format or capacity errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from ..errors import TreeCAError
from ..io import (
    format_oned_config,
    format_trajectory,
    load_config,
    load_rule,
    oned_rule_to_dict,
    parse_oned_config,
    save_oned_rule,
    save_rule,
    trajectory_to_json,
)
from ..quotient import oned_run, quotient_rule
from ..rules import ball_to_string, enumerate_canonical_balls, rule_from_index
from ..simulation import run
from .census import Horizons, census, census_csv, census_jsonl, classify
from .suites import CHECKS, replay, run_suites

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE = 0, 1, 2


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _horizons(args) -> Horizons:
    return Horizons(nmax=args.nmax, tmax=args.tmax, samples=args.samples, seed=args.seed)


def cmd_simulate(args) -> int:
    rule = load_rule(args.rule)
    x = load_config(args.config, rule.k, rule.alphabet_size)
    traj = run(rule, x, args.steps)
    if args.format == "json":
        _write(trajectory_to_json(traj.configs, traj.profile), args.out)
    else:
        _write(format_trajectory(traj.configs), args.out)
    return EXIT_OK


def cmd_quotient(args) -> int:
    rule = load_rule(args.rule)
    bar = quotient_rule(rule)
    if args.out:
        save_oned_rule(bar, args.out)
    else:
        sys.stdout.write(json.dumps(oned_rule_to_dict(bar), indent=1) + "\n")
    if args.config:
        x = parse_oned_config(Path(args.config).read_text(), rule.alphabet_size)
        for n, y in enumerate(oned_run(bar, x, args.steps)):
            sys.stderr.write(f"## step {n}\n" + format_oned_config(y))
    return EXIT_OK


def cmd_census(args) -> int:
    hz = _horizons(args)
    records, summary = census(args.k, args.alphabet, args.radius, hz, start=args.start, stop=args.stop,
                              workers=args.workers)
    text = census_csv(records, hz if args.header else None) if args.format == "csv" else census_jsonl(records)
    _write(text, args.out)
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=1) + "\n")
    if args.out:
        sys.stderr.write(json.dumps(summary) + "\n")
    return EXIT_OK if summary["inconsistent_records"] == 0 else EXIT_PROPERTY


def cmd_classify(args) -> int:
    if args.rule:
        rule = load_rule(args.rule)
    else:
        if None in (args.k, args.alphabet, args.radius, args.index):
            args.parser.error("classify needs --rule or all of --k --alphabet --radius --index")
        rule = rule_from_index(args.k, args.alphabet, args.radius, args.index)
    rec = classify(rule, _horizons(args))
    _write(json.dumps(asdict(rec), indent=1) + "\n", args.out)
    return EXIT_OK if rec.consistent() else EXIT_PROPERTY


def cmd_verify(args) -> int:
    if args.replay:
        msg = replay(args.replay)
        if msg is None:
            print(f"PASS replay {args.replay}")
            return EXIT_OK
        print(f"FAIL replay {args.replay}: {msg}")
        return EXIT_PROPERTY
    names = list(CHECKS) if args.suite == "all" else [args.suite]
    report = run_suites(names, seed=args.seed, count=args.count, dump_dir=args.dump_dir)
    for line in report.lines():
        print(line)
    if not report.ok and args.dump_dir:
        print(f"replay a dump with: treeca verify --replay <dir under {args.dump_dir}>")
    return EXIT_OK if report.ok else EXIT_PROPERTY


def cmd_enumerate_balls(args) -> int:
    balls = enumerate_canonical_balls(args.k, args.alphabet, args.radius, cap=args.cap)
    _write("".join(f"{i} {ball_to_string(b)}\n" for i, b in enumerate(balls)), args.out)
    return EXIT_OK


def cmd_make_rule(args) -> int:
    rule = rule_from_index(args.k, args.alphabet, args.radius, args.index)
    save_rule(rule, args.out)
    return EXIT_OK


def _add_horizon_flags(p):
    p.add_argument("--nmax", type=int, default=4, help="largest nilpotency horizon checked")
    p.add_argument("--tmax", type=int, default=16, help="steps simulated per sampled configuration")
    p.add_argument("--samples", type=int, default=64, help="sampled finite configurations per rule")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treeca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="iterate a rule on a finite configuration")
    p.add_argument("--rule", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("quotient", help="write the induced one-dimensional rule")
    p.add_argument("--rule", required=True)
    p.add_argument("--out")
    p.add_argument("--config", help="optional 1D configuration to simulate (trajectory on stderr)")
    p.add_argument("--steps", type=int, default=0)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("census", help="classify every rule of a family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    _add_horizon_flags(p)
    p.add_argument("--start", type=int, help="first rule index of the shard")
    p.add_argument("--stop", type=int, help="one past the last rule index of the shard")
    p.add_argument("--workers", type=int, help="parallel workers (default: $TREECA_WORKERS or 1)")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--header", action="store_true", help="prefix the CSV with a '#' line recording the horizons and seed")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("classify", help="classify a single rule")
    p.add_argument("--rule")
    p.add_argument("--k", type=int)
    p.add_argument("--alphabet", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--index", type=int)
    _add_horizon_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify, parser=p)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=["all", *CHECKS], default="all")
    p.add_argument("--count", type=int, help="random cases per randomized suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-dir", help="write counterexamples here")
    p.add_argument("--replay", help="re-run one dumped counterexample directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate-balls", help="list canonical balls in canonical order")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--cap", type=int, default=10**7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate_balls)

    p = sub.add_parser("make-rule", help="write the rule file for a rule index")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_rule)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help exits 0, usage errors exit 2
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except (TreeCAError, OSError, json.JSONDecodeError) as e:
        print(f"treeca: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
