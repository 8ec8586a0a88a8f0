"""
Report Writer

Turns a dataset file into a FullReport, decides the exit code and renders
the human-readable tables.

Exit codes:
    0  every assessable hard criterion (S1, S2, B1, B2) passed
    1  usage, IO or configuration error
    2  a criterion failed, or a precondition was not met
    3  the dataset could not be parsed at all
    4  the chat-completion endpoint failed

Usage:
    report = evaluate_file(Path("day.csv"), settings, seed=seed)
    write_text_atomic(Path("report.json"), report_to_json(report))
    print(format_summary(report))
"""

import logging
import os
import tempfile
from enum import IntEnum
from pathlib import Path

from pydantic import BaseModel

from usage_synth import __version__
from usage_synth.core.config import Settings
from usage_synth.core.exceptions import UsageParseError
from usage_synth.models.reports import ComplianceReport, FullReport, RealismReport, Status
from usage_synth.models.usage import Provenance, UsageDataset
from usage_synth.services.compliance import evaluate_compliance
from usage_synth.services.realism import RealismConfig, evaluate_realism
from usage_synth.services.usage_csv import parse_dataset

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    USAGE_ERROR = 1
    CRITERIA_FAILED = 2
    FATAL_PARSE = 3
    ENDPOINT_FAILURE = 4


def write_text_atomic(path: Path, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def load_dataset(path: Path, provenance: Provenance | None = None) -> UsageDataset:
    """Read and parse a CSV file. Raises OSError or UsageParseError."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_dataset(text, provenance or Provenance(source=str(path)))


def exit_code_for(compliance: ComplianceReport, realism: RealismReport) -> ExitCode:
    hard = (compliance.s1.status, compliance.s2.status, realism.b1.status, realism.b2.status)
    return ExitCode.CRITERIA_FAILED if Status.FAIL in hard else ExitCode.OK


def build_report(
    dataset: UsageDataset,
    settings: Settings,
    dataset_ref: str,
    seed: UsageDataset | None = None,
    references: list[UsageDataset] | None = None,
) -> FullReport:
    compliance = evaluate_compliance(dataset)
    realism = evaluate_realism(dataset, seed, RealismConfig.from_settings(settings), references)
    return FullReport(
        tool_version=__version__,
        dataset_ref=dataset_ref,
        seed_ref=seed.provenance.source if seed is not None else None,
        reference_refs=tuple(ref.provenance.source or ref.label for ref in references or ()),
        compliance=compliance,
        realism=realism,
        exit_code=int(exit_code_for(compliance, realism)),
        config_echo=settings.echo(),
    )


def fatal_report(
    error: UsageParseError | str,
    settings: Settings,
    dataset_ref: str,
    seed: UsageDataset | None = None,
    references: list[UsageDataset] | None = None,
) -> FullReport:
    """Report for a dataset that never became a dataset; S1 counts as failed."""
    return FullReport(
        tool_version=__version__,
        dataset_ref=dataset_ref,
        seed_ref=seed.provenance.source if seed is not None else None,
        reference_refs=tuple(ref.provenance.source or ref.label for ref in references or ()),
        fatal_error=str(error),
        fatal_findings=tuple(error.fatal) if isinstance(error, UsageParseError) else (),
        exit_code=int(ExitCode.FATAL_PARSE),
        config_echo=settings.echo(),
    )


def evaluate_text(
    csv_text: str,
    provenance: Provenance,
    settings: Settings,
    seed: UsageDataset | None = None,
    references: list[UsageDataset] | None = None,
) -> FullReport:
    dataset_ref = provenance.source or provenance.origin.value
    try:
        dataset = parse_dataset(csv_text, provenance)
    except UsageParseError as e:
        logger.warning(f"Fatal parse error in {dataset_ref}: {e}")
        return fatal_report(e, settings, dataset_ref, seed, references)
    return build_report(dataset, settings, dataset_ref, seed, references)


def evaluate_file(
    path: Path,
    settings: Settings,
    seed: UsageDataset | None = None,
    references: list[UsageDataset] | None = None,
) -> FullReport:
    """Evaluate one CSV file; OSError propagates for unreadable paths."""
    text = Path(path).read_text(encoding="utf-8")
    return evaluate_text(text, Provenance(source=str(path)), settings, seed, references)


def report_to_json(report: FullReport) -> str:
    return report.model_dump_json(indent=2) + "\n"


# --- Text tables ---

def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]
    lines = ["  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def summary_rows(report: FullReport) -> list[list[str]]:
    """(criterion, status, key numbers); every number is a value stored in the JSON report."""
    if report.compliance is None or report.realism is None:
        return [["parse", "fatal", report.fatal_error or ""]]
    c, r = report.compliance, report.realism
    return [
        ["S1", c.s1.status.value, f"findings={len(c.s1.findings)}"],
        ["S2", c.s2.status.value, ""],
        ["S3", c.s3.status.value, ""],
        ["B1", r.b1.status.value, f"total_usage_h={r.b1.total_usage_h}"],
        ["B2", r.b2.status.value,
         f"longest_gap_s={r.b2.longest_gap_s} sleep_overlap_s={r.b2.sleep_overlap_s}"
         if r.b2.longest_gap_s is not None else ""],
        ["B3", r.b3.status.value,
         f"app_count={r.b3.app_count} top_k_overlap_pct={r.b3.top_k_overlap_pct}"],
        ["B4", r.b4.status.value,
         f"log_ks={r.b4.log_level.ks_stat} session_ks={r.b4.session_level.ks_stat}"],
        ["B5", r.b5.status.value,
         f"log_ks={r.b5.log_level.ks_stat} session_ks={r.b5.session_level.ks_stat}"],
    ]


def format_summary(report: FullReport) -> str:
    title = f"{report.dataset_ref} (exit {report.exit_code})"
    return title + "\n" + _table(["criterion", "status", "value"], summary_rows(report))


def format_hms(seconds: int | None) -> str:
    if seconds is None:
        return "n/a"
    hours, rest = divmod(seconds, 3600)
    return f"{hours:02d}:{rest // 60:02d}:{rest % 60:02d}"


class ComparisonRow(BaseModel):
    """One dataset in a side-by-side comparison across datasets or attempts."""

    label: str
    s1: str
    s2: str
    total_usage_h: float | None = None
    longest_gap: str = "n/a"
    b2: str = "n/a"
    app_count: int | None = None
    top_k_overlap_pct: float | None = None
    b4_log_ks: float | None = None
    exit_code: int


def comparison_row(label: str, report: FullReport) -> ComparisonRow:
    if report.compliance is None or report.realism is None:
        return ComparisonRow(label=label, s1="fail", s2="n/a", exit_code=report.exit_code)
    r = report.realism
    return ComparisonRow(
        label=label,
        s1=report.compliance.s1.status.value,
        s2=report.compliance.s2.status.value,
        total_usage_h=r.b1.total_usage_h,
        longest_gap=format_hms(r.b2.longest_gap_s),
        b2=r.b2.status.value,
        app_count=r.b3.app_count,
        top_k_overlap_pct=r.b3.top_k_overlap_pct,
        b4_log_ks=r.b4.log_level.ks_stat,
        exit_code=report.exit_code,
    )


def format_comparison(rows: list[ComparisonRow]) -> str:
    header = ["dataset", "S1", "S2", "usage_h", "longest_gap", "B2", "apps", "top_k_%", "B4_log_ks"]
    body = [
        [row.label, row.s1, row.s2, row.total_usage_h, row.longest_gap, row.b2,
         row.app_count, row.top_k_overlap_pct, row.b4_log_ks]
        for row in rows
    ]
    return _table(header, [["-" if cell is None else str(cell) for cell in line] for line in body])


def worst_exit_code(codes: list[int]) -> ExitCode:
    return ExitCode(max(codes, default=ExitCode.OK))
