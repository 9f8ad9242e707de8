"""Command-line front end.

Exit codes: 0 success, 1 parse/usage error, 2 unsatisfiable model or
derivation cap, 3 I/O failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from pathlib import Path

from .constraints import DerivationCapExceeded, Unsatisfiable
from .generator import DEFAULT_MAX_MODIFICATIONS, GenerationError, GeneratorConfig, generate
from .model import ModelError
from .oracle import EnumerationCapExceeded, verify_rows_only, verify_suite
from .parser import ParseError, parse_model

EXIT_OK, EXIT_PARSE, EXIT_UNSAT, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="citgen", description="Generate a constrained t-wise covering test suite."
    )
    ap.add_argument("model", help="CIT model file (PARAMETERS / CONSTRAINTS)")
    ap.add_argument("-t", "--strength", type=int, default=2)
    ap.add_argument("--seed", type=int, default=None, help="default: random, always reported")
    budget = ap.add_mutually_exclusive_group()
    budget.add_argument("--time-budget-ms", type=int, default=None,
                        help="wall-clock improvement budget (default 5000)")
    budget.add_argument("--rounds", type=int, default=None, dest="improve_rounds",
                        help="fixed number of improvement rounds (deterministic)")
    ap.add_argument("--max-modifications", type=int, default=DEFAULT_MAX_MODIFICATIONS)
    ap.add_argument("-f", "--format", choices=("json", "csv", "text"), default="json")
    ap.add_argument("--verify", action="store_true", help="check the suite with the brute-force oracle")
    ap.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    ap.add_argument("--figures", default=None, metavar="DIR", help="write PNG figures to DIR")
    ap.add_argument("--show-constraints", action="store_true",
                    help="print the closed forbidden tuples and cleaned matrix to stderr")
    return ap


def format_suite(result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2) + "\n"
    rows = result.named_tests()
    names = list(result.space.names)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        writer.writerows(rows)
        return buf.getvalue()
    widths = [max([len(n)] + [len(r[i]) for r in rows]) for i, n in enumerate(names)]
    lines = ["  ".join(n.ljust(w) for n, w in zip(names, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    lines.append(f"# {len(rows)} tests, t={result.strength}, seed={result.seed}")
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr

    try:
        text = Path(args.model).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.model}: {exc}", file=err)
        return EXIT_IO
    try:
        model = parse_model(text)
        model.space.check_strength(args.strength)
    except (ParseError, ModelError) as exc:
        print(f"error: {args.model}: {exc}", file=err)
        return EXIT_PARSE

    seed = args.seed if args.seed is not None else secrets.randbits(64)
    if args.improve_rounds is not None:
        budget = dict(improve_rounds=args.improve_rounds)
    else:
        ms = 5000 if args.time_budget_ms is None else args.time_budget_ms
        budget = dict(time_budget=ms / 1000.0)
    try:
        config = GeneratorConfig(
            strength=args.strength, seed=seed, max_modifications=args.max_modifications, **budget
        )
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE

    try:
        result = generate(model, config)
    except Unsatisfiable as exc:
        print(f"error: unsatisfiable model: {exc}", file=err)
        return EXIT_UNSAT
    except DerivationCapExceeded as exc:
        print(f"error: {exc}", file=err)
        return EXIT_UNSAT
    except GenerationError as exc:
        print(f"error: generation failed: {exc}", file=err)
        return EXIT_UNSAT

    if args.show_constraints:
        print(f"forbidden tuples: {result.forbidden.format()}", file=err)
        print(result.matrix.render(), file=err)
    if args.format != "json":
        print(f"seed: {seed}", file=err)

    report = None
    if args.verify:
        try:
            report = verify_suite(result.tests, model.space, model.clauses, result.strength)
        except EnumerationCapExceeded as exc:
            print(f"warning: {exc}; checking row validity only", file=err)
            report = verify_rows_only(result.tests, model.space, model.clauses)
        print(report.to_text(), file=err)

    out = format_suite(result, args.format)
    try:
        if args.output is None:
            sys.stdout.write(out)
        else:
            Path(args.output).write_text(out, encoding="utf-8")
            if report is not None:
                Path(args.output + ".oracle.json").write_text(
                    report.to_json(model.space) + "\n", encoding="utf-8"
                )
        if args.figures:
            from .plotting import write_figures

            for path in write_figures(result, args.figures):
                print(f"figure: {path}", file=err)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=err)
        return EXIT_IO

    if report is not None and not report.passed:
        return EXIT_VERIFY
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
