"""
dS QFT Lab - CLI Module

Command-line interface for verification runs, tables and report checks.

Usage:
    dsqft run --config config.json [--suite omega --suite rep] [--out reports]
    dsqft table omega --zeta 1 --r 1 --K 64 [--out omega.csv]
    dsqft verify reports/

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error, 3 numerical failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from app.config import settings

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SUITE_CHOICES = [
    "geometry", "omega", "kernel", "rep", "sobolev", "modular",
    "fsl", "micro", "additivity", "standard", "duality", "fock",
]


def configure_logging():
    """Structured JSON-line logging on stderr."""
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='{"time":"%(asctime)s","level":"%(levelname)s","message":"%(message)s","module":"%(module)s"}',
    )


def main(argv=None):
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(
        prog="dsqft",
        description="dS QFT Lab - numerical verification of the free field on de Sitter space",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run verification suites from a config file")
    run_parser.add_argument("--config", "-c", type=str, required=True, help="Suite config JSON")
    run_parser.add_argument(
        "--suite", "-s",
        action="append",
        choices=SUITE_CHOICES,
        help="Suite to run (repeatable; default: the suites listed in the config)",
    )
    run_parser.add_argument("--out", "-o", type=str, help="Report directory")
    run_parser.add_argument(
        "--format", "-f",
        action="append",
        choices=["json", "csv"],
        help="Output format (repeatable; default: json and csv)",
    )
    run_parser.add_argument("--workers", "-w", type=int, help="Suites run concurrently")

    # Table command
    table_parser = subparsers.add_parser("table", help="Print or write a table")
    table_parser.add_argument("name", choices=["omega"], help="Table to produce")
    table_parser.add_argument("--zeta", type=float, required=True, help="Casimir parameter zeta")
    table_parser.add_argument("--r", type=float, default=1.0, help="de Sitter radius")
    table_parser.add_argument("--K", type=int, default=64, help="Mode cutoff")
    table_parser.add_argument("--out", "-o", type=str, help="CSV path (stdout if omitted)")

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Verify a report directory offline")
    verify_parser.add_argument("directory", type=str, help="Report directory")
    verify_parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Show detailed verification report",
    )

    # Parse arguments
    args = parser.parse_args(argv)
    configure_logging()

    if args.command == "run":
        code = cmd_run(args)
    elif args.command == "table":
        code = cmd_table(args)
    elif args.command == "verify":
        code = cmd_verify(args)
    else:
        parser.print_help()
        code = EXIT_FAILED
    sys.exit(code)


def load_config(path, out=None, workers=None):
    """
    Read and validate a suite config; DSQFT_PRECISION overrides its precision.

    Raises:
        OSError, ValueError: unreadable file, invalid JSON or invalid fields
    """
    import json
    from app.config import Precision
    from app.schemas import SuiteConfig

    with open(path, "r") as f:
        data = json.load(f)
    config = SuiteConfig.model_validate(data)

    update = {}
    override = os.environ.get("DSQFT_PRECISION")
    if override:
        update["precision"] = Precision(override.lower())
    if out:
        update["output_dir"] = out
    if workers:
        update["workers"] = workers
    if update:
        config = SuiteConfig.model_validate({**config.model_dump(), **update})
    return config


def cmd_run(args):
    """Handle run command."""
    from pydantic import ValidationError

    from app.errors import ContractError, NumericalError
    from app.reports import emit_report, format_run_summary
    from app.schemas import SuiteName
    from app.suites import make_context, run_suites

    try:
        config = load_config(args.config, args.out, args.workers)
    except FileNotFoundError:
        print(f"❌ Config not found: {args.config}")
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"❌ Invalid config {args.config}:")
        for error in e.errors():
            field = ".".join(str(part) for part in error["loc"]) or "config"
            print(f"   {field}: {error['msg']}")
        return EXIT_CONFIG
    except ValueError as e:
        print(f"❌ Invalid config {args.config}: {e}")
        return EXIT_CONFIG

    suites = [SuiteName(name) for name in args.suite] if args.suite else None
    print(f"\n🔬 Running suites from {Path(args.config).name}")
    print("─" * 50)

    try:
        context = make_context(config)
        reports = run_suites(config, suites)
    except NumericalError as e:
        print(f"❌ Numerical failure: {e}")
        return EXIT_NUMERICAL
    except ContractError as e:
        print(f"❌ Invalid parameters: {e}")
        return EXIT_CONFIG

    out_dir = emit_report(
        reports,
        context.config_hash,
        config.output_dir,
        tuple(args.format or ("json", "csv")),
    )
    print(format_run_summary(reports))
    print(f"   Reports: {out_dir}")
    print(f"   Config hash: {context.config_hash}")

    return EXIT_OK if all(r.all_passed for r in reports) else EXIT_FAILED


def cmd_table(args):
    """Handle table command."""
    from app.errors import DsqftError
    from app.oneparticle import SpectralWeights, omega_table, write_omega_csv
    from app.specfun import make_params

    try:
        params = make_params(args.zeta, args.r)
        w = SpectralWeights.from_params(params, args.K, settings.precision)
    except DsqftError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        path = write_omega_csv(w, args.out)
        print(f"✅ omega table written: {path}")
    else:
        print("k,omega")
        for row in omega_table(w):
            print(f"{row['k']},{row['omega']!r}")
    return EXIT_OK


def cmd_verify(args):
    """Handle verify command."""
    from app.reports import format_verification_report, verify_report_dir

    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"❌ Directory not found: {directory}")
        return EXIT_FAILED

    print(f"\n🔍 Verifying reports: {directory}")
    print("─" * 50)

    result = verify_report_dir(directory)
    if args.verbose:
        print(format_verification_report(result))
    elif result.is_valid:
        print("🎉 Report directory verified successfully!")
        print(f"   Hash: {result.computed_hash}")
    else:
        print("❌ Verification FAILED")
        print(f"   Expected: {result.expected_hash}")
        print(f"   Computed: {result.computed_hash}")
        for error in result.errors:
            print(f"   Error: {error}")

    return EXIT_OK if result.is_valid else EXIT_FAILED


if __name__ == "__main__":
    main()
