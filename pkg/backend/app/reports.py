"""
dS QFT Lab - Reports & Verification Module

Writes suite reports to a directory, hashes them deterministically and verifies a report
directory offline.
"""

import csv
import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from app import __version__
from app.config import settings
from app.schemas import SUITE_ORDER, SuiteReport
from app.utils import canonical_hash

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"
TIMINGS_FILE = "timings.json"


class ReportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


def get_output_dir(path: Optional[Union[str, Path]] = None) -> Path:
    """Report directory, created on demand."""
    out_dir = Path(path or settings.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


# ============================================================================
# Hash Computation
# ============================================================================

def compute_report_hash(report: Dict[str, Any]) -> str:
    """Hash of one canonical suite report (wall time is never part of it)."""
    canonical = {key: value for key, value in report.items() if key != "wall_time"}
    return canonical_hash(canonical)


def compute_reports_hash(reports: List[Dict[str, Any]]) -> str:
    """
    Hash of a whole run.

    Per-suite hashes are combined in suite order, so the value does not depend on the order the
    suites finished in.
    """
    order = {name.value: i for i, name in enumerate(SUITE_ORDER)}
    ordered = sorted(reports, key=lambda r: order.get(r.get("suite", ""), len(order)))
    return canonical_hash([[r.get("suite"), compute_report_hash(r)] for r in ordered])


def build_summary(reports: List[SuiteReport], config_hash: str) -> Dict[str, Any]:
    canonical = [r.canonical() for r in reports]
    return {
        "version": __version__,
        "config_hash": config_hash,
        "all_passed": all(r.all_passed for r in reports),
        "suites": {
            r.suite.value: {
                "all_passed": r.all_passed,
                "failing": sorted(m for m, ok in r.passed.items() if not ok),
                "report_hash": compute_report_hash(c),
            }
            for r, c in zip(reports, canonical)
        },
        "reports_hash": compute_reports_hash(canonical),
    }


# ============================================================================
# Emission
# ============================================================================

def _write_json(path: Path, data: Any) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
        f.write("\n")


def _write_table(path: Path, rows: List[Dict[str, Any]]) -> None:
    fieldnames: List[str] = []
    for row in rows:
        fieldnames.extend(key for key in row if key not in fieldnames)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def emit_report(
    reports: List[SuiteReport],
    config_hash: str,
    out_dir: Optional[Union[str, Path]] = None,
    formats: Tuple[ReportFormat, ...] = (ReportFormat.JSON, ReportFormat.CSV),
) -> Path:
    """
    Write a run to a directory.

    JSON: one <suite>.json per report (sorted keys, wall time excluded), summary.json with the
    config hash and the run hash, and timings.json with wall times (not hashed).
    CSV: one <table>.csv per report table (e.g. omega.csv with header k,omega) and one
    <suite>_metrics.csv per report.

    Args:
        reports: Suite reports in suite order
        config_hash: Hash of the canonical configuration
        out_dir: Target directory (settings.output_dir by default)
        formats: Output formats to write

    Returns:
        The report directory
    """
    out = get_output_dir(out_dir)
    formats = tuple(ReportFormat(f) for f in formats)

    if ReportFormat.JSON in formats:
        for report in reports:
            _write_json(out / f"{report.suite.value}.json", report.canonical())
        summary = build_summary(reports, config_hash)
        _write_json(out / SUMMARY_FILE, summary)
        _write_json(out / TIMINGS_FILE, {r.suite.value: round(r.wall_time, 3) for r in reports})
        logger.info(
            f"Reports saved: {out}",
            extra={"config_hash": config_hash, "reports_hash": summary["reports_hash"]},
        )

    if ReportFormat.CSV in formats:
        for report in reports:
            for name, rows in report.tables.items():
                if rows:
                    _write_table(out / f"{name}.csv", rows)
            _write_table(
                out / f"{report.suite.value}_metrics.csv",
                [
                    {
                        "metric": name,
                        "value": value,
                        "threshold": report.thresholds[name],
                        "passed": report.passed[name],
                    }
                    for name, value in report.metrics.items()
                ],
            )
        logger.info(f"CSV tables saved: {out}")

    return out


def load_reports(report_dir: Union[str, Path]) -> List[Dict[str, Any]]:
    """Per-suite report dicts of a directory, in suite order."""
    report_dir = Path(report_dir)
    loaded = []
    for name in SUITE_ORDER:
        path = report_dir / f"{name.value}.json"
        if path.exists():
            with open(path, "r") as f:
                loaded.append(json.load(f))
    return loaded


# ============================================================================
# Verification
# ============================================================================

@dataclass
class VerificationResult:
    """Result of report directory verification."""

    is_valid: bool
    reports_hash_match: bool
    suite_hashes_match: bool
    config_hash_match: bool
    expected_hash: Optional[str] = None
    computed_hash: Optional[str] = None
    errors: List[str] = None

    def __post_init__(self):
        if self.errors is None:
            self.errors = []


def verify_report_dir(report_dir: Union[str, Path]) -> VerificationResult:
    """
    Recompute the hashes of a report directory and compare them with summary.json.

    Checks the run hash, every per-suite hash, the config hash carried by each report and that
    every suite named in the summary has a report file.
    """
    report_dir = Path(report_dir)
    summary_path = report_dir / SUMMARY_FILE
    if not summary_path.exists():
        return VerificationResult(
            is_valid=False,
            reports_hash_match=False,
            suite_hashes_match=False,
            config_hash_match=False,
            errors=[f"{SUMMARY_FILE} missing - cannot verify"],
        )

    try:
        with open(summary_path, "r") as f:
            summary = json.load(f)
        reports = load_reports(report_dir)
        errors = []

        by_suite = {r.get("suite"): r for r in reports}
        listed = summary.get("suites", {})
        missing = sorted(set(listed) - set(by_suite))
        if missing:
            errors.append(f"Missing suite reports: {', '.join(missing)}")

        suite_match = not missing
        for name, entry in listed.items():
            if name in by_suite and compute_report_hash(by_suite[name]) != entry.get("report_hash"):
                suite_match = False
                errors.append(f"Report hash mismatch for suite {name}")

        config_hash = summary.get("config_hash")
        config_match = all(r.get("config_hash") == config_hash for r in reports)
        if not config_match:
            errors.append("Reports carry a different config hash than the summary")

        expected = summary.get("reports_hash")
        computed = compute_reports_hash(reports)
        run_match = computed == expected
        if not run_match:
            errors.append("Run hash mismatch - reports may have been modified")

        return VerificationResult(
            is_valid=run_match and suite_match and config_match,
            reports_hash_match=run_match,
            suite_hashes_match=suite_match,
            config_hash_match=config_match,
            expected_hash=expected,
            computed_hash=computed,
            errors=errors,
        )

    except (OSError, json.JSONDecodeError) as e:
        return VerificationResult(
            is_valid=False,
            reports_hash_match=False,
            suite_hashes_match=False,
            config_hash_match=False,
            errors=[f"Verification failed: {str(e)}"],
        )


# ============================================================================
# CLI Helpers
# ============================================================================

def format_verification_report(result: VerificationResult) -> str:
    """Format verification result as human-readable report."""
    lines = [
        "═" * 50,
        "REPORT VERIFICATION",
        "═" * 50,
        "",
        f"Run Hash:     {'✅ MATCH' if result.reports_hash_match else '❌ MISMATCH'}",
        f"Suite Hashes: {'✅ MATCH' if result.suite_hashes_match else '❌ MISMATCH'}",
        f"Config Hash:  {'✅ MATCH' if result.config_hash_match else '❌ MISMATCH'}",
        "",
        "─" * 50,
        f"OVERALL: {'🎉 VERIFIED' if result.is_valid else '⚠️ VERIFICATION FAILED'}",
        "─" * 50,
    ]

    if result.errors:
        lines.append("")
        lines.append("Errors:")
        for error in result.errors:
            lines.append(f"  • {error}")

    return "\n".join(lines)


def format_run_summary(reports: List[SuiteReport]) -> str:
    """One line per suite with its failing metrics."""
    lines = ["═" * 50, "SUITE RESULTS", "═" * 50, ""]
    for report in reports:
        mark = "✅" if report.all_passed else "❌"
        lines.append(f"{mark} {report.suite.value:<12} {len(report.metrics)} metrics  {report.wall_time:.2f}s")
        for name, ok in report.passed.items():
            if not ok:
                lines.append(
                    f"     • {name} = {report.metrics[name]:.3e} > {report.thresholds[name]:.1e}"
                )
    passed = all(r.all_passed for r in reports)
    lines += ["", "─" * 50, f"OVERALL: {'🎉 ALL PASSED' if passed else '⚠️ FAILURES'}", "─" * 50]
    return "\n".join(lines)
