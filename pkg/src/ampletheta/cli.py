"""Command-line entry point.

    ampletheta verify <suite> --config FILE [--seed N] [--out PATH] [--format json|text]
    ampletheta list-suites
    ampletheta defaults --print

Exit codes: 0 overall PASS, 1 FAIL, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ampletheta.config import SUITES, ConfigError, defaults, load_config
from ampletheta.harness import run_suite
from ampletheta.report import emit_report

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ampletheta", description="Certified checks for degenerate theta linear systems.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="suite name (see list-suites)")
    v.add_argument("--config", help="TOML config file; defaults are used when omitted")
    v.add_argument("--seed", type=int, help="override the config seed")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--format", choices=("json", "text"), default="json")

    sub.add_parser("list-suites", help="print the available suites")

    d = sub.add_parser("defaults", help="show the default configuration")
    d.add_argument("--print", action="store_true", dest="do_print",
                   help="print the defaults as TOML")
    return p


def _verify(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else defaults()
        cfg.suite = args.suite
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        report = run_suite(cfg)
    except ConfigError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line else ""
        key = f" [key: {exc.key}]" if exc.key else ""
        print(f"configuration error{where}{key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        sys.stdout.write(text)
    else:
        print(f"{report.suite}: {report.verdict} -> {args.out}", file=sys.stderr)
    return report.exit_code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    if args.command == "verify":
        return _verify(args)
    if args.command == "list-suites":
        print("\n".join(SUITES))
        return EXIT_PASS
    if args.command == "defaults":
        sys.stdout.write(defaults().to_toml())
        return EXIT_PASS
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
