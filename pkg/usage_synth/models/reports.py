"""Pydantic schemas for evaluation results and the JSON report."""

from __future__ import annotations

from datetime import date, datetime
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from usage_synth.models.usage import StructuralFinding


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_ASSESSABLE = "not_assessable"
    REPORT_ONLY = "report_only"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


# --- Structural compliance ---

class CheckResult(_Frozen):
    status: Status
    findings: tuple[StructuralFinding, ...] = ()
    detail: str = ""


class ComplianceReport(_Frozen):
    s1: CheckResult
    s2: CheckResult
    s3: CheckResult


# --- Distributions ---

class Histogram(_Frozen):
    """
    Log-binned counts. `bin_edges_s` are lower edges; bin i covers
    [edges[i], edges[i+1]) and the last bin is open-ended. The first bin,
    [0, 1), holds only zero for integer inputs.
    """

    bin_edges_s: tuple[int, ...]
    counts: tuple[int, ...]
    total: int

    @model_validator(mode="after")
    def _conserved(self) -> Histogram:
        if len(self.counts) != len(self.bin_edges_s):
            raise ValueError("one count per bin expected")
        if sum(self.counts) != self.total:
            raise ValueError("bin counts must sum to total")
        if any(b <= a for a, b in zip(self.bin_edges_s, self.bin_edges_s[1:])):
            raise ValueError("bin edges must be strictly increasing")
        return self


class ReferenceDistance(_Frozen):
    label: str
    ks_stat: float | None = None
    wasserstein_log10: float | None = None


class DistributionComparison(_Frozen):
    """One series (durations or gaps) at one grouping level, optionally compared to references."""

    status: Status
    n: int = 0
    histogram: Histogram | None = None
    ks_stat: float | None = Field(None, ge=0.0, le=1.0)
    wasserstein_log10: float | None = Field(None, ge=0.0)
    median_s: float | None = None
    short_share: float | None = None  # share of units under 100 s
    modal_share: float | None = None  # share of units equal to the most frequent value
    per_reference: tuple[ReferenceDistance, ...] = ()
    detail: str = ""


class DistributionCriterion(_Frozen):
    status: Status
    log_level: DistributionComparison
    session_level: DistributionComparison


# --- Behavioral realism ---

class UsageTotalResult(_Frozen):
    status: Status
    total_usage_h: float
    per_day_h: dict[date, float] = {}
    detail: str = ""


class LongestGap(_Frozen):
    gap_s: int
    gap_start: datetime | None = None
    gap_end: datetime | None = None


class SleepGapResult(_Frozen):
    status: Status
    longest_gap_s: int | None = None
    longest_gap_start: datetime | None = None
    longest_gap_end: datetime | None = None
    sleep_overlap_s: int | None = None
    qualifying_gap_found: bool = False
    detail: str = ""


class AppVarietyResult(_Frozen):
    status: Status
    app_count: int
    top_k: tuple[str, ...] = ()
    top_k_overlap_pct: float | None = None
    novel_apps: tuple[str, ...] = ()
    novel_app_share_pct: float | None = None
    detail: str = ""


class RealismReport(_Frozen):
    b1: UsageTotalResult
    b2: SleepGapResult
    b3: AppVarietyResult
    b4: DistributionCriterion
    b5: DistributionCriterion


# --- Full report ---

class FullReport(_Frozen):
    tool_version: str
    dataset_ref: str
    seed_ref: str | None = None
    reference_refs: tuple[str, ...] = ()
    fatal_error: str | None = None
    fatal_findings: tuple[StructuralFinding, ...] = ()
    compliance: ComplianceReport | None = None
    realism: RealismReport | None = None
    exit_code: int
    config_echo: dict[str, Any] = {}
