"""
Usage CSV Codec

Parses the four-column usage-log interchange format into a UsageDataset and
writes the canonical form back out.

Two header naming schemes are in circulation, so each logical column accepts
a set of aliases (matched case-insensitively):

    id        - id
    start     - timestamp, created-at, created_at
    app_id    - app, app-id, app_id
    duration  - duration, time-seconds, time_seconds

Canonical output header: id,created-at,app-id,time-seconds

Usage:
    dataset = parse_dataset(Path("day.csv").read_text(), Provenance(origin=Origin.REAL))
    text = write_dataset(dataset)
"""

import csv
import io
import logging
import re
from datetime import date, datetime, time
from importlib import resources

from usage_synth.core.exceptions import UsageParseError
from usage_synth.models.usage import (
    FindingCode,
    Provenance,
    StructuralFinding,
    UsageDataset,
    UsageLog,
)

logger = logging.getLogger(__name__)


# --- Column aliases ---

COLUMN_ALIASES: dict[str, tuple[str, ...]] = {
    "id": ("id",),
    "start": ("timestamp", "created-at", "created_at"),
    "app_id": ("app", "app-id", "app_id"),
    "duration": ("duration", "time-seconds", "time_seconds"),
}

CANONICAL_HEADER = ("id", "created-at", "app-id", "time-seconds")

# More than this share of unparseable rows makes the whole reply a failure.
MAX_BAD_ROW_SHARE = 0.5

_DATE_ONLY = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DECIMAL_COMMA = re.compile(r"^-?\d+,\d+$")


def match_header(fields: list[str]) -> dict[str, int] | None:
    """Map logical columns to header positions; None when any column is missing."""
    normalized = [f.strip().lower() for f in fields]
    positions: dict[str, int] = {}
    for column, aliases in COLUMN_ALIASES.items():
        for idx, name in enumerate(normalized):
            if name in aliases:
                positions[column] = idx
                break
    if len(positions) != len(COLUMN_ALIASES):
        return None
    return positions


def parse_timestamp(raw: str) -> tuple[datetime, bool]:
    """
    Parse an ISO 8601 timestamp, truncated to whole seconds, timezone dropped.

    Returns (value, date_only). A bare date parses to midnight with date_only=True.
    Raises ValueError for anything else.
    """
    text = raw.strip()
    if _DATE_ONLY.match(text):
        return datetime.combine(date.fromisoformat(text), time()), True
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    value = datetime.fromisoformat(text)
    return value.replace(tzinfo=None, microsecond=0), False


def parse_duration(raw: str) -> int:
    """Parse seconds; accepts decimals and decimal commas ("42,3"). Raises ValueError."""
    text = raw.strip()
    if _DECIMAL_COMMA.match(text):
        text = text.replace(",", ".")
    return int(round(float(text)))


def parse_dataset(csv_text: str, provenance: Provenance | None = None) -> UsageDataset:
    """
    Parse CSV text into a normalized UsageDataset.

    Recoverable problems are attached as findings. Rows that cannot become a
    log are dropped with a finding. Raises UsageParseError when a column is
    missing, there are no data rows, or more than half the rows were dropped.
    """
    provenance = provenance or Provenance()
    reader = csv.reader(io.StringIO(csv_text.lstrip("\ufeff")))

    header: list[str] | None = None
    for fields in reader:
        if any(f.strip() for f in fields):
            header = fields
            break
    if header is None:
        finding = StructuralFinding(code=FindingCode.EMPTY_DATASET, detail="no header row")
        raise UsageParseError("CSV is empty", fatal=[finding])

    positions = match_header(header)
    if positions is None:
        missing = [
            column for column, aliases in COLUMN_ALIASES.items()
            if not any(f.strip().lower() in aliases for f in header)
        ]
        fatal = [
            StructuralFinding(
                code=FindingCode.MISSING_COLUMN,
                detail=f"no header matches {column} aliases {COLUMN_ALIASES[column]}",
            )
            for column in missing
        ]
        raise UsageParseError(f"Missing required columns: {', '.join(missing)}", fatal=fatal)

    findings: list[StructuralFinding] = []
    logs: list[UsageLog] = []
    seen_ids: set[str] = set()
    data_rows = 0
    dropped = 0

    for fields in reader:
        if not any(f.strip() for f in fields):
            continue
        data_rows += 1
        row = data_rows

        fields, extra = _merge_extra_fields(fields, len(header), positions)
        if extra is not None:
            findings.append(StructuralFinding(code=FindingCode.EXTRA_FIELDS, row=row, detail=extra))

        problem = _row_problem(fields, positions)
        if problem is not None:
            findings.append(StructuralFinding(code=problem[0], row=row, detail=problem[1]))
            dropped += 1
            continue

        log_id = fields[positions["id"]].strip()
        start, date_only = parse_timestamp(fields[positions["start"]])
        if date_only:
            findings.append(StructuralFinding(
                code=FindingCode.DATE_ONLY_TIMESTAMP,
                row=row,
                detail=f"timestamp {fields[positions['start']].strip()!r} has no time-of-day",
            ))
        if log_id in seen_ids:
            findings.append(StructuralFinding(
                code=FindingCode.DUPLICATE_ID, row=row, detail=f"id {log_id!r} repeats",
            ))
        seen_ids.add(log_id)

        logs.append(UsageLog(
            id=log_id,
            start=start,
            app_id=fields[positions["app_id"]],
            duration_s=parse_duration(fields[positions["duration"]]),
            date_only=date_only,
        ))

    if data_rows == 0:
        finding = StructuralFinding(code=FindingCode.EMPTY_DATASET, detail="header without data rows")
        raise UsageParseError("CSV has no data rows", fatal=[finding], findings=findings + [finding])

    if dropped / data_rows > MAX_BAD_ROW_SHARE:
        fatal = [f for f in findings if f.code.drops_row]
        raise UsageParseError(
            f"{dropped} of {data_rows} rows could not be parsed",
            fatal=fatal,
            findings=findings,
        )

    dataset = normalize(UsageDataset(
        logs=tuple(logs), provenance=provenance, violations=tuple(findings),
    ))
    dataset = _flag_overlaps(dataset)

    logger.info(
        f"Parsed {len(dataset.logs)} logs from {data_rows} rows "
        f"({dropped} dropped, {len(dataset.violations)} findings)"
    )
    return dataset


def _row_problem(fields: list[str], positions: dict[str, int]) -> tuple[FindingCode, str] | None:
    """First reason a row cannot become a log, or None."""
    width = max(positions.values()) + 1
    if len(fields) < width:
        return FindingCode.MALFORMED_ROW, f"row has {len(fields)} fields, expected {width}"

    raw_start = fields[positions["start"]]
    try:
        start, _ = parse_timestamp(raw_start)
    except ValueError:
        return FindingCode.BAD_TIMESTAMP, f"unparseable timestamp {raw_start.strip()!r}"

    raw_duration = fields[positions["duration"]]
    try:
        duration = parse_duration(raw_duration)
    except (ValueError, OverflowError):
        return FindingCode.NON_NUMERIC_DURATION, f"duration {raw_duration.strip()!r} is not a number"
    if duration < 0:
        return FindingCode.NEGATIVE_DURATION, f"duration {duration} is negative"
    if duration > (datetime.max - start).total_seconds():
        return FindingCode.DURATION_OUT_OF_RANGE, f"duration {duration} ends past the last representable time"

    if not fields[positions["app_id"]].strip():
        return FindingCode.EMPTY_APP_ID, "app id is empty"
    return None


def _merge_extra_fields(
    fields: list[str], header_width: int, positions: dict[str, int],
) -> tuple[list[str], str | None]:
    """Rejoin an unquoted decimal comma in a trailing duration; describe any other surplus."""
    if len(fields) <= header_width:
        return fields, None
    extra = fields[header_width:]
    if not any(f.strip() for f in extra):
        return fields[:header_width], None
    duration_at = positions["duration"]
    candidate = f"{fields[duration_at].strip()},{extra[0].strip()}"
    if len(extra) == 1 and duration_at == header_width - 1 and _DECIMAL_COMMA.match(candidate):
        return fields[:duration_at] + [candidate], f"unquoted decimal comma read as duration {candidate!r}"
    return fields[:header_width], f"row has {len(fields)} fields, header has {header_width}; surplus ignored"


def _flag_overlaps(dataset: UsageDataset) -> UsageDataset:
    """Record OverlapWarning for logs that start before the running activity end."""
    if not dataset.has_time_of_day:
        return dataset
    overlaps: list[StructuralFinding] = []
    latest_end = None
    for log in dataset.logs:
        if latest_end is not None and log.start < latest_end:
            overlaps.append(StructuralFinding(
                code=FindingCode.OVERLAP_WARNING,
                detail=f"log {log.id!r} starts {int((latest_end - log.start).total_seconds())} s "
                       f"before the previous activity ends",
            ))
        if latest_end is None or log.end > latest_end:
            latest_end = log.end
    if not overlaps:
        return dataset
    logger.warning(f"{len(overlaps)} overlapping logs")
    return dataset.model_copy(update={"violations": dataset.violations + tuple(overlaps)})


def normalize(dataset: UsageDataset) -> UsageDataset:
    """Stable sort by (start, id); appends UnsortedInput when the order changed. Idempotent."""
    ordered = tuple(sorted(dataset.logs, key=lambda log: log.order_key))
    if ordered == dataset.logs:
        return dataset
    finding = StructuralFinding(
        code=FindingCode.UNSORTED_INPUT,
        detail="logs were not in chronological order and have been sorted",
    )
    return dataset.model_copy(update={
        "logs": ordered,
        "violations": dataset.violations + (finding,),
    })


def format_timestamp(value: datetime) -> str:
    return value.strftime("%Y-%m-%dT%H:%M:%S")


def write_dataset(dataset: UsageDataset) -> str:
    """Canonical four-column CSV (LF line endings) in normalized order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CANONICAL_HEADER)
    for log in sorted(dataset.logs, key=lambda log: log.order_key):
        writer.writerow([log.id, format_timestamp(log.start), log.app_id, log.duration_s])
    return buf.getvalue()


def bundled_seed_csv() -> str:
    """The real usage day shipped with the package."""
    return resources.files("usage_synth").joinpath("data/seed_day.csv").read_text(encoding="utf-8")
