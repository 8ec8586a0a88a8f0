"""Usage-log data model: logs, datasets, provenance and structural findings."""

from __future__ import annotations

from datetime import date, datetime, timedelta
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator


# --- Enums ---

class Origin(str, Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"
    BASELINE = "baseline"


class PromptLabel(str, Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"


class FindingCode(str, Enum):
    MISSING_COLUMN = "MissingColumn"
    BAD_TIMESTAMP = "BadTimestamp"
    DATE_ONLY_TIMESTAMP = "DateOnlyTimestamp"
    NEGATIVE_DURATION = "NegativeDuration"
    NON_NUMERIC_DURATION = "NonNumericDuration"
    EMPTY_APP_ID = "EmptyAppId"
    MALFORMED_ROW = "MalformedRow"
    DURATION_OUT_OF_RANGE = "DurationOutOfRange"
    EXTRA_FIELDS = "ExtraFields"
    DUPLICATE_ID = "DuplicateId"
    UNSORTED_INPUT = "UnsortedInput"
    EMPTY_DATASET = "EmptyDataset"
    AGGREGATED_ROWS = "AggregatedRows"
    OVERLAP_WARNING = "OverlapWarning"

    @property
    def is_fatal(self) -> bool:
        """Fatal codes never yield a dataset (NonNumericDuration is fatal for its row)."""
        return self in _FATAL_CODES

    @property
    def drops_row(self) -> bool:
        """Row-level codes whose row cannot become a UsageLog."""
        return self in _ROW_DROPPING_CODES


_FATAL_CODES = frozenset({
    FindingCode.MISSING_COLUMN,
    FindingCode.NON_NUMERIC_DURATION,
    FindingCode.EMPTY_DATASET,
})

_ROW_DROPPING_CODES = frozenset({
    FindingCode.BAD_TIMESTAMP,
    FindingCode.NEGATIVE_DURATION,
    FindingCode.NON_NUMERIC_DURATION,
    FindingCode.EMPTY_APP_ID,
    FindingCode.MALFORMED_ROW,
    FindingCode.DURATION_OUT_OF_RANGE,
})


# --- Models ---

class StructuralFinding(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: FindingCode
    row: int | None = None  # 1-based data row, header excluded
    detail: str = ""


class UsageLog(BaseModel):
    """One app-usage event. `date_only` marks a start parsed from a date without time-of-day."""

    model_config = ConfigDict(frozen=True)

    id: str
    start: datetime
    app_id: str
    duration_s: int = Field(ge=0)
    date_only: bool = False

    @field_validator("app_id")
    @classmethod
    def _strip_app(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("app_id must not be empty")
        return value

    @field_validator("start")
    @classmethod
    def _naive_seconds(cls, value: datetime) -> datetime:
        return value.replace(tzinfo=None, microsecond=0)

    @property
    def order_key(self) -> tuple:
        """(start, id) with numeric ids compared as numbers, so "9" sorts before "10"."""
        if self.id.isascii() and self.id.isdigit():
            return self.start, (0, int(self.id), self.id)
        return self.start, (1, 0, self.id)

    @property
    def end(self) -> datetime:
        return self.start + timedelta(seconds=self.duration_s)

    @property
    def day(self) -> date:
        return self.start.date()


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True)

    origin: Origin = Origin.SYNTHETIC
    prompt_label: PromptLabel | None = None
    attempt: int | None = Field(None, gt=0)
    reply_count: int | None = Field(None, gt=0)
    source: str | None = None  # file path or run directory, for labelling only


class UsageDataset(BaseModel):
    """Ordered logs plus provenance and the findings collected while parsing."""

    model_config = ConfigDict(frozen=True)

    logs: tuple[UsageLog, ...] = ()
    provenance: Provenance = Provenance()
    violations: tuple[StructuralFinding, ...] = ()

    def __len__(self) -> int:
        return len(self.logs)

    def has_finding(self, code: FindingCode) -> bool:
        return any(f.code == code for f in self.violations)

    def findings_of(self, *codes: FindingCode) -> list[StructuralFinding]:
        return [f for f in self.violations if f.code in codes]

    @property
    def has_time_of_day(self) -> bool:
        """False when any start was parsed from a date-only timestamp."""
        return not self.has_finding(FindingCode.DATE_ONLY_TIMESTAMP) and not any(
            log.date_only for log in self.logs
        )

    @property
    def label(self) -> str:
        p = self.provenance
        if p.prompt_label and p.attempt:
            return f"{p.prompt_label.value}.{p.attempt}"
        return p.source or p.origin.value
