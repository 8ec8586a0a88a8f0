"""
Structural Compliance (S1-S3)

S1  all fields present with correct formats
S2  rows are raw per-event logs, not an aggregated summary
S3  the dataset arrived in a single model reply

S2 is a conservative heuristic: it fails a dataset only when every signal of
a summary is present at once (one row per app and day, uninformative
timestamps, long mean duration). A wrong S2 fail would block analysis that is
otherwise possible, so ambiguous cases pass.
"""

import logging
from collections import Counter, defaultdict

from usage_synth.models.reports import CheckResult, ComplianceReport, Status
from usage_synth.models.usage import FindingCode, StructuralFinding, UsageDataset

logger = logging.getLogger(__name__)

S1_FAILING_CODES = (
    FindingCode.BAD_TIMESTAMP,
    FindingCode.DATE_ONLY_TIMESTAMP,
    FindingCode.NEGATIVE_DURATION,
    FindingCode.NON_NUMERIC_DURATION,
    FindingCode.EMPTY_APP_ID,
    FindingCode.MALFORMED_ROW,
    FindingCode.DURATION_OUT_OF_RANGE,
    FindingCode.EXTRA_FIELDS,
    FindingCode.DUPLICATE_ID,
)

# Mean row duration above which one-row-per-app data reads as a usage summary.
SUMMARY_MEAN_DURATION_S = 1_800

S2_HEURISTIC_NOTE = "heuristic approximation of a manual raw-vs-summary judgement"


def check_s1(dataset: UsageDataset) -> CheckResult:
    findings = tuple(dataset.findings_of(*S1_FAILING_CODES))
    if not findings:
        return CheckResult(status=Status.PASS, detail="all fields present and well formed")
    counts = Counter(f.code.value for f in findings)
    summary = ", ".join(f"{code} x{n}" for code, n in sorted(counts.items()))
    return CheckResult(status=Status.FAIL, findings=findings, detail=summary)


def check_s2(dataset: UsageDataset) -> CheckResult:
    logs = dataset.logs
    if not logs:
        return CheckResult(status=Status.PASS, detail=f"no rows; {S2_HEURISTIC_NOTE}")

    per_app_day = Counter((log.app_id, log.day) for log in logs)
    one_row_per_app_day = max(per_app_day.values()) <= 1

    all_date_only = all(log.date_only for log in logs)
    times_by_day = defaultdict(set)
    for log in logs:
        times_by_day[log.day].add(log.start.time())
    single_time_of_day = all(len(times) == 1 for times in times_by_day.values())
    uninformative_times = all_date_only or single_time_of_day

    mean_duration = sum(log.duration_s for log in logs) / len(logs)
    long_rows = mean_duration > SUMMARY_MEAN_DURATION_S

    triggers = (
        f"one_row_per_app_day={one_row_per_app_day}, "
        f"uninformative_timestamps={uninformative_times}, "
        f"mean_duration_s={mean_duration:.0f}"
    )
    if one_row_per_app_day and uninformative_times and long_rows:
        finding = StructuralFinding(
            code=FindingCode.AGGREGATED_ROWS,
            detail=f"rows look like a per-app usage summary ({triggers})",
        )
        logger.info(f"S2 fail: {finding.detail}")
        return CheckResult(
            status=Status.FAIL,
            findings=(finding,),
            detail=f"{triggers}; {S2_HEURISTIC_NOTE}",
        )
    return CheckResult(status=Status.PASS, detail=f"{triggers}; {S2_HEURISTIC_NOTE}")


def check_s3(dataset: UsageDataset) -> CheckResult:
    reply_count = dataset.provenance.reply_count
    if reply_count is None:
        return CheckResult(status=Status.NOT_ASSESSABLE, detail="reply count unknown")
    if reply_count == 1:
        return CheckResult(status=Status.PASS, detail="single model reply")
    return CheckResult(status=Status.FAIL, detail=f"{reply_count} model replies")


def evaluate_compliance(dataset: UsageDataset) -> ComplianceReport:
    return ComplianceReport(
        s1=check_s1(dataset),
        s2=check_s2(dataset),
        s3=check_s3(dataset),
    )
