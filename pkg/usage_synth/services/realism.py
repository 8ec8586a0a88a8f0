"""
Behavioral Realism (B1-B5)

B1  daily screen time within [1, 20] hours (inclusive), every calendar day
B2  a non-usage period overlapping one 20:00-10:00 night by 5 h or more
B3  app variety; top-k overlap and novel apps against the seed
B4  usage-length distribution (log level and session level)
B5  non-usage-length distribution (log level and session level)

B3-B5 are comparative. They carry numbers for every dataset and comparison
statistics when a seed (and optionally more reference days) is supplied.
They only pass or fail when `ks_fail_threshold` is configured.

Usage:
    config = RealismConfig.from_settings(load_settings())
    report = evaluate_realism(dataset, seed, config)
"""

import json
import logging
import statistics
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from importlib import resources
from pathlib import Path
from typing import Sequence

from pydantic import BaseModel, ConfigDict, Field

from usage_synth.core.config import Settings
from usage_synth.core.exceptions import MetricNotAssessable, SessionizeError
from usage_synth.models.reports import (
    AppVarietyResult,
    DistributionComparison,
    DistributionCriterion,
    LongestGap,
    RealismReport,
    ReferenceDistance,
    SleepGapResult,
    Status,
    UsageTotalResult,
)
from usage_synth.models.usage import UsageDataset
from usage_synth.services.distributions import (
    build_histogram,
    compare_distributions,
    modal_share,
    short_share,
)
from usage_synth.services.sessionizer import (
    DEFAULT_GAP_THRESHOLD_S,
    log_level_units,
    session_gaps,
    sessionize,
)

logger = logging.getLogger(__name__)


def load_app_aliases(path: str | Path | None = None) -> dict[str, str]:
    """Alias map (casefolded name -> casefolded canonical name); bundled file by default."""
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    else:
        raw = json.loads(
            resources.files("usage_synth").joinpath("data/app_aliases.json").read_text(encoding="utf-8")
        )
    return {_fold(alias): _fold(canonical) for alias, canonical in raw.items()}


class RealismConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    gap_threshold_s: int = Field(60, ge=0)
    top_k: int = Field(5, gt=0)
    ks_fail_threshold: float | None = Field(None, ge=0.0, le=1.0)
    b1_min_hours: float = 1.0
    b1_max_hours: float = 20.0
    sleep_window_start_hour: int = 20
    sleep_window_end_hour: int = 10
    min_sleep_gap_s: int = 18_000
    app_aliases: dict[str, str] = {}

    @classmethod
    def from_settings(cls, settings: Settings) -> "RealismConfig":
        return cls(
            gap_threshold_s=settings.gap_threshold_s,
            top_k=settings.top_k,
            ks_fail_threshold=settings.ks_fail_threshold,
            b1_min_hours=settings.b1_min_hours,
            b1_max_hours=settings.b1_max_hours,
            sleep_window_start_hour=settings.sleep_window_start_hour,
            sleep_window_end_hour=settings.sleep_window_end_hour,
            min_sleep_gap_s=settings.min_sleep_gap_s,
            app_aliases=load_app_aliases(settings.app_alias_path or None),
        )


# --- B1: total usage ---

def usage_by_day(dataset: UsageDataset) -> dict[date, int]:
    """Usage seconds per calendar day of the log start."""
    totals: dict[date, int] = defaultdict(int)
    for log in dataset.logs:
        totals[log.day] += log.duration_s
    return dict(sorted(totals.items()))


def total_usage(dataset: UsageDataset) -> float:
    """Total usage in hours, summed over calendar days, rounded to one decimal."""
    return round(sum(usage_by_day(dataset).values()) / 3600, 1)


def check_b1(dataset: UsageDataset, config: RealismConfig | None = None) -> UsageTotalResult:
    config = config or RealismConfig()
    per_day = usage_by_day(dataset)
    out_of_range = [
        day for day, seconds in per_day.items()
        if not config.b1_min_hours <= seconds / 3600 <= config.b1_max_hours
    ]
    status = Status.FAIL if out_of_range or not per_day else Status.PASS
    detail = (
        f"days outside [{config.b1_min_hours}, {config.b1_max_hours}] h: "
        + ", ".join(d.isoformat() for d in out_of_range)
        if out_of_range else f"all {len(per_day)} day(s) within range"
    )
    return UsageTotalResult(
        status=status,
        total_usage_h=total_usage(dataset),
        per_day_h={day: round(seconds / 3600, 1) for day, seconds in per_day.items()},
        detail=detail,
    )


# --- B2: circadian rhythm ---

def inactivity_gaps(dataset: UsageDataset) -> list[tuple[datetime, datetime]]:
    """
    Periods without activity inside the dataset's extent, measured from the
    running activity end to the next start. No virtual gaps before the first
    or after the last log.
    """
    if not dataset.has_time_of_day:
        raise MetricNotAssessable("timestamps have no time-of-day")
    gaps: list[tuple[datetime, datetime]] = []
    latest_end: datetime | None = None
    for log in dataset.logs:
        if latest_end is not None and log.start > latest_end:
            gaps.append((latest_end, log.start))
        if latest_end is None or log.end > latest_end:
            latest_end = log.end
    return gaps


def longest_gap(dataset: UsageDataset) -> LongestGap:
    gaps = inactivity_gaps(dataset)
    if not gaps:
        return LongestGap(gap_s=0)
    # max() keeps the earliest of equally long gaps
    start, end = max(gaps, key=lambda g: g[1] - g[0])
    return LongestGap(gap_s=int((end - start).total_seconds()), gap_start=start, gap_end=end)


def sleep_overlap_s(
    gap_start: datetime,
    gap_end: datetime,
    window_start_hour: int = 20,
    window_end_hour: int = 10,
) -> int:
    """Largest overlap, in seconds, between a gap and any single night window."""
    best = 0
    day = gap_start.date() - timedelta(days=1)
    while day <= gap_end.date():
        night_start = datetime.combine(day, datetime.min.time()) + timedelta(hours=window_start_hour)
        night_end = datetime.combine(day, datetime.min.time()) + timedelta(hours=window_end_hour)
        if window_end_hour <= window_start_hour:
            night_end += timedelta(days=1)
        overlap = (min(gap_end, night_end) - max(gap_start, night_start)).total_seconds()
        best = max(best, int(overlap))
        day += timedelta(days=1)
    return best


def check_b2(dataset: UsageDataset, config: RealismConfig | None = None) -> SleepGapResult:
    config = config or RealismConfig()
    try:
        gaps = inactivity_gaps(dataset)
    except MetricNotAssessable as e:
        return SleepGapResult(status=Status.NOT_ASSESSABLE, detail=str(e))

    longest = longest_gap(dataset)
    best_overlap = 0
    for start, end in gaps:
        best_overlap = max(best_overlap, sleep_overlap_s(
            start, end, config.sleep_window_start_hour, config.sleep_window_end_hour,
        ))
    found = best_overlap >= config.min_sleep_gap_s
    if not gaps:
        detail = "continuous usage, no inactivity period"
    else:
        detail = (
            f"largest night overlap {best_overlap} s "
            f"(needs {config.min_sleep_gap_s} s within "
            f"{config.sleep_window_start_hour:02d}:00-{config.sleep_window_end_hour:02d}:00)"
        )
    return SleepGapResult(
        status=Status.PASS if found else Status.FAIL,
        longest_gap_s=longest.gap_s,
        longest_gap_start=longest.gap_start,
        longest_gap_end=longest.gap_end,
        sleep_overlap_s=best_overlap,
        qualifying_gap_found=found,
        detail=detail,
    )


# --- B3: app variety ---

@dataclass
class AppStats:
    app_count: int
    per_app_time_s: dict[str, int] = field(default_factory=dict)
    top_k: list[str] = field(default_factory=list)


def app_stats(dataset: UsageDataset, k: int = 5) -> AppStats:
    """Distinct apps (case-sensitive) and the k most used by time; ties by name ascending."""
    per_app: dict[str, int] = defaultdict(int)
    for log in dataset.logs:
        per_app[log.app_id] += log.duration_s
    ranked = sorted(per_app.items(), key=lambda item: (-item[1], item[0]))
    return AppStats(
        app_count=len(per_app),
        per_app_time_s=dict(ranked),
        top_k=[app for app, _ in ranked[:k]],
    )


def _fold(name: str) -> str:
    return unicodedata.normalize("NFKC", name.strip()).casefold()


def canonical_app(name: str, aliases: dict[str, str] | None = None) -> str:
    key = _fold(name)
    return (aliases or {}).get(key, key)


def top_k_overlap(
    dataset: UsageDataset,
    seed: UsageDataset,
    k: int = 5,
    aliases: dict[str, str] | None = None,
) -> float:
    """Percentage of the dataset's top-k apps that are also in the seed's top-k (rank ignored)."""
    if not dataset.logs or not seed.logs:
        raise MetricNotAssessable("top-k overlap needs two non-empty datasets")
    mine = app_stats(dataset, k)
    theirs = app_stats(seed, k)
    if k > mine.app_count or k > theirs.app_count:
        raise MetricNotAssessable(
            f"k={k} exceeds app count ({mine.app_count} vs seed {theirs.app_count})"
        )
    shared = {canonical_app(a, aliases) for a in mine.top_k}
    shared &= {canonical_app(a, aliases) for a in theirs.top_k}
    return len(shared) / k * 100


def novel_apps(
    dataset: UsageDataset,
    seed: UsageDataset,
    aliases: dict[str, str] | None = None,
) -> tuple[list[str], float]:
    """Apps absent from the seed, and the share of usage time (percent) spent in them."""
    seed_apps = {canonical_app(log.app_id, aliases) for log in seed.logs}
    stats = app_stats(dataset, k=0)
    novel = sorted(app for app in stats.per_app_time_s if canonical_app(app, aliases) not in seed_apps)
    total = sum(stats.per_app_time_s.values())
    novel_time = sum(stats.per_app_time_s[app] for app in novel)
    return novel, (novel_time / total * 100 if total else 0.0)


def check_b3(
    dataset: UsageDataset,
    seed: UsageDataset | None,
    config: RealismConfig | None = None,
) -> AppVarietyResult:
    config = config or RealismConfig()
    stats = app_stats(dataset, config.top_k)
    if seed is None:
        return AppVarietyResult(
            status=Status.REPORT_ONLY,
            app_count=stats.app_count,
            top_k=tuple(stats.top_k),
            detail="no seed supplied; counts only",
        )

    novel, novel_share = novel_apps(dataset, seed, config.app_aliases)
    try:
        overlap = top_k_overlap(dataset, seed, config.top_k, config.app_aliases)
    except MetricNotAssessable as e:
        return AppVarietyResult(
            status=Status.NOT_ASSESSABLE,
            app_count=stats.app_count,
            top_k=tuple(stats.top_k),
            novel_apps=tuple(novel),
            novel_app_share_pct=round(novel_share, 1),
            detail=str(e),
        )
    return AppVarietyResult(
        status=Status.REPORT_ONLY,
        app_count=stats.app_count,
        top_k=tuple(stats.top_k),
        top_k_overlap_pct=round(overlap, 1),
        novel_apps=tuple(novel),
        novel_app_share_pct=round(novel_share, 1),
        detail=f"seed has {app_stats(seed, 0).app_count} apps",
    )


# --- B4 / B5: distributions ---

UNIT_KINDS = ("duration", "gap")
UNIT_LEVELS = ("log", "session")


def unit_series(
    dataset: UsageDataset,
    kind: str,
    level: str,
    gap_threshold_s: int = DEFAULT_GAP_THRESHOLD_S,
) -> list[int]:
    """
    Durations or gaps at log or session level.

    Raises MetricNotAssessable when the series needs time-of-day and the
    timestamps are date-only.
    """
    if kind not in UNIT_KINDS or level not in UNIT_LEVELS:
        raise ValueError(f"unknown series {kind!r}/{level!r}")
    if kind == "duration" and level == "log":
        return [log.duration_s for log in dataset.logs]
    try:
        if level == "log":
            _, gaps = log_level_units(dataset)
            return list(gaps.gaps_s)
        sessions = sessionize(dataset, gap_threshold_s)
        if kind == "duration":
            return [s.span_s for s in sessions]
        return list(session_gaps(sessions).gaps_s)
    except SessionizeError as e:
        raise MetricNotAssessable(str(e)) from e


def _compare(
    values: Sequence[int],
    references: list[tuple[str, list[int]]],
    kind: str,
    config: RealismConfig,
) -> DistributionComparison:
    if not values:
        return DistributionComparison(
            status=Status.NOT_ASSESSABLE,
            histogram=build_histogram([]),
            detail=f"no {kind} units",
        )

    describe = {
        "n": len(values),
        "histogram": build_histogram(values),
        "median_s": float(statistics.median(values)),
        "short_share": short_share(values) if kind == "duration" else None,
        "modal_share": modal_share(values) if kind == "gap" else None,
    }
    usable = [(label, ref) for label, ref in references if ref]
    if not usable:
        return DistributionComparison(status=Status.REPORT_ONLY, **describe)

    pooled = [v for _, ref in usable for v in ref]
    stats = compare_distributions(values, pooled)
    per_reference = []
    for label, ref in usable:
        one = compare_distributions(values, ref)
        per_reference.append(ReferenceDistance(
            label=label,
            ks_stat=round(one["ks_stat"], 6),
            wasserstein_log10=round(one["wasserstein_log10"], 6),
        ))

    ks_stat = round(stats["ks_stat"], 6)
    if config.ks_fail_threshold is None:
        status = Status.REPORT_ONLY
        detail = "no KS threshold configured"
    elif ks_stat > config.ks_fail_threshold:
        status = Status.FAIL
        detail = f"KS {ks_stat} > threshold {config.ks_fail_threshold} (non-canonical threshold)"
    else:
        status = Status.PASS
        detail = f"KS {ks_stat} <= threshold {config.ks_fail_threshold} (non-canonical threshold)"

    return DistributionComparison(
        status=status,
        ks_stat=ks_stat,
        wasserstein_log10=round(stats["wasserstein_log10"], 6),
        per_reference=tuple(per_reference),
        detail=detail,
        **describe,
    )


def _criterion(
    dataset: UsageDataset,
    references: list[UsageDataset],
    kind: str,
    config: RealismConfig,
) -> DistributionCriterion:
    levels = {}
    for level in ("log", "session"):
        try:
            values = unit_series(dataset, kind, level, config.gap_threshold_s)
        except MetricNotAssessable as e:
            levels[level] = DistributionComparison(status=Status.NOT_ASSESSABLE, detail=str(e))
            continue
        ref_series = []
        for ref in references:
            try:
                ref_series.append((ref.label, unit_series(ref, kind, level, config.gap_threshold_s)))
            except MetricNotAssessable:
                logger.warning(f"Reference {ref.label} skipped for {level}-level {kind}s")
        levels[level] = _compare(values, ref_series, kind, config)

    statuses = [c.status for c in levels.values()]
    if all(s == Status.NOT_ASSESSABLE for s in statuses):
        overall = Status.NOT_ASSESSABLE
    elif Status.FAIL in statuses:
        overall = Status.FAIL
    elif Status.PASS in statuses:
        overall = Status.PASS
    else:
        overall = Status.REPORT_ONLY
    return DistributionCriterion(status=overall, log_level=levels["log"], session_level=levels["session"])


def evaluate_realism(
    dataset: UsageDataset,
    seed: UsageDataset | None = None,
    config: RealismConfig | None = None,
    references: list[UsageDataset] | None = None,
) -> RealismReport:
    """Run B1-B5. Individual metrics degrade to not_assessable instead of aborting."""
    config = config or RealismConfig()
    comparison_sets = ([seed] if seed is not None else []) + list(references or [])
    report = RealismReport(
        b1=check_b1(dataset, config),
        b2=check_b2(dataset, config),
        b3=check_b3(dataset, seed, config),
        b4=_criterion(dataset, comparison_sets, "duration", config),
        b5=_criterion(dataset, comparison_sets, "gap", config),
    )
    logger.info(
        f"Realism for {dataset.label}: B1={report.b1.status.value} "
        f"({report.b1.total_usage_h} h), B2={report.b2.status.value}, "
        f"B3 overlap={report.b3.top_k_overlap_pct}"
    )
    return report
