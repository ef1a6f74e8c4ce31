"""Command line: `workbench run <scenario.toml>` and `workbench golden <report> <golden>`.

Exit codes: 0 success, 1 a task failed (or the input could not be read, parsed or
validated), 2 the report differs from the golden file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ParseError, ValidationError, WorkbenchError
from .report import compare_golden, load_report, run
from .scenario import load_scenario

EXIT_OK, EXIT_TASK, EXIT_GOLDEN = 0, 1, 2
EXIT_INPUT = EXIT_TASK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="workbench", description="Curved algebra computation workbench.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file and write a JSON report")
    r.add_argument("scenario", type=Path)
    r.add_argument("--out", type=Path, help="report path (default: stdout)")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--jobs", type=int, default=1, help="worker threads for slice computations")
    r.add_argument("--golden", type=Path, help="compare the report against this golden file")
    r.add_argument("--csv", type=Path, help="also write the non-zero cohomology slices as CSV")
    g = sub.add_parser("golden", help="compare an existing report with a golden file")
    g.add_argument("report", type=Path)
    g.add_argument("golden", type=Path)
    return ap


def _print_diffs(diffs: list) -> None:
    for d in diffs:
        print(f"  {d}", file=sys.stderr)


def _read_json(path: Path):
    try:
        return load_report(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
    except json.JSONDecodeError as exc:
        print(f"error: {path}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
    return None


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {args.scenario}:{exc.line}:{exc.column}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as exc:
        print(f"error: {args.scenario}: {exc.field}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WorkbenchError as exc:
        print(f"error: {args.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    rep = run(sc, seed=args.seed, jobs=args.jobs)
    text = rep.dumps()
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.csv:
        args.csv.write_text(rep.to_csv(), encoding="utf-8")
    code = EXIT_OK
    for i, t in enumerate(rep.tasks):
        if t["status"] != "ok":
            print(f"task {i} ({t['kind']}) failed: {t['error']['type']}: {t['error']['message']}",
                  file=sys.stderr)
            code = EXIT_TASK
    if args.golden:
        golden = _read_json(args.golden)
        if golden is None:
            return EXIT_INPUT
        diffs = compare_golden(rep, golden)
        if diffs:
            print(f"report differs from {args.golden} at {len(diffs)} path(s):", file=sys.stderr)
            _print_diffs(diffs)
            code = code or EXIT_GOLDEN
    return code


def cmd_golden(args) -> int:
    rep, golden = _read_json(args.report), _read_json(args.golden)
    if rep is None or golden is None:
        return EXIT_INPUT
    diffs = compare_golden(rep, golden)
    if diffs:
        print(f"{args.report} differs from {args.golden} at {len(diffs)} path(s):", file=sys.stderr)
        _print_diffs(diffs)
        return EXIT_GOLDEN
    print(f"{args.report} matches {args.golden}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return cmd_run(args) if args.command == "run" else cmd_golden(args)


if __name__ == "__main__":
    sys.exit(main())
