"""Command-line driver.

    PYTHONPATH=src poetry run python -m cli --suite I-B3
    PYTHONPATH=src poetry run python -m cli --suite III-A7 --checks semidirect --json report.json
    PYTHONPATH=src poetry run python -m cli repl --case I-B3

Exit status: 0 when every executed identity passed (skips allowed only with
--allow-skip), 1 on a failing or skipped identity, 2 on a configuration error.
"""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

from algebra.parser import ParseError
from algebra.words import AlgebraError
from config import SUITES, ConfigError, SuiteConfig, load_config
from models.enums import CheckStatus
from models.report import ReportRow, SuiteReport
from models.rootdata import RootDataError
from services.eval_service import DEFAULT_CASE, Evaluator
from services.suite_service import exit_code, run_suite, system_loader

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsp-braid", description=__doc__.splitlines()[0])
    parser.add_argument("command", nargs="?", choices=("run", "repl"), default="run")
    parser.add_argument("--suite", help=f"one of {', '.join(SUITES)}")
    parser.add_argument("--checks", help="comma separated check names")
    parser.add_argument("--degree-cap", type=int)
    parser.add_argument("--mem-limit", help="e.g. 8G")
    parser.add_argument("--time-budget", type=float, help="seconds per identity")
    parser.add_argument("--long", action="store_true", default=None, help="include G2 braid/order and E6 checks")
    parser.add_argument("--json", dest="json_path", metavar="PATH", help="report file, '-' for stdout")
    parser.add_argument("--cache-dir", metavar="PATH")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--allow-skip", action="store_true", default=None)
    parser.add_argument("--log-level")
    parser.add_argument("--case", default=DEFAULT_CASE, help="initial case for the repl")
    return parser


def config_from_args(args: argparse.Namespace) -> SuiteConfig:
    return load_config(
        suite=args.suite,
        checks=args.checks,
        degree_cap=args.degree_cap,
        mem_limit=args.mem_limit,
        time_budget=args.time_budget,
        long=args.long,
        json_path=args.json_path,
        cache_dir=args.cache_dir,
        workers=args.workers,
        allow_skip=args.allow_skip,
        log_level=args.log_level,
        progress=sys.stderr.isatty() and args.json_path != "-",
    )


def _print_failures(rows: list[ReportRow], out: TextIO) -> None:
    for row in rows:
        if row.status is CheckStatus.PASS:
            continue
        print(f"  {row.status.value:7} {row.suite} {row.check} {row.identity}: {row.detail or ''}", file=out)


def write_report(report: SuiteReport, path: str) -> None:
    payload = report.model_dump(mode="json")
    if path == "-":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    logger.info("report written to %s", path)


def run(cfg: SuiteConfig, out: TextIO = sys.stderr) -> int:
    report = run_suite(cfg, on_rows=lambda rows: _print_failures(rows, out))
    if cfg.json_path:
        write_report(report, cfg.json_path)
    counts = report.counts()
    print(
        f"{cfg.suite}: {counts[CheckStatus.PASS]} pass, {counts[CheckStatus.FAIL]} fail, "
        f"{counts[CheckStatus.SKIPPED]} skipped",
        file=out,
    )
    return exit_code(report, allow_skip=cfg.allow_skip)


def repl(cfg: SuiteConfig, case_id: str, stdin: TextIO = sys.stdin, out: TextIO = sys.stdout) -> int:
    evaluator = Evaluator(case_id, degree_cap=cfg.degree_cap, system_loader=system_loader(cfg))
    interactive = stdin.isatty()
    while True:
        if interactive:
            out.write(f"{evaluator.case_id}> ")
            out.flush()
        line = stdin.readline()
        if not line:
            return EXIT_OK
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("quit", "exit"):
            return EXIT_OK
        try:
            print(evaluator.render(line), file=out)
        except ParseError as e:
            print(f"error: {e.message} at offset {e.position}", file=out)
            print(f"  {line}\n  {' ' * e.position}^", file=out)
        except (AlgebraError, RootDataError) as e:
            print(f"error: {e}", file=out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=cfg.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if args.command == "repl":
        try:
            return repl(cfg, args.case)
        except RootDataError as e:
            print(f"configuration error: {e}", file=sys.stderr)
            return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
