"""
Baseline Generator

Non-LLM comparator that synthesizes a day of usage by resampling the seed's
empirical tables:

    hour_intensity      log counts per hour-of-day (start times)
    app_freq_by_hour    which apps were used in each hour
    per_app_durations_s duration sample per app

Every draw comes from a numpy Generator seeded with (seed_value, date), so a
day is reproducible on its own and independent of the other days in a batch.

Usage:
    profile = profile_seed(seed)
    day = generate_day(profile, date(2025, 4, 18), GenConfig(seed_value=7))
"""

import logging
from collections import Counter, defaultdict
from datetime import date, datetime, timedelta
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from usage_synth.core.config import Settings
from usage_synth.core.exceptions import GenerationError, SeedProfileError
from usage_synth.models.usage import Origin, Provenance, UsageDataset, UsageLog

logger = logging.getLogger(__name__)

MIN_SEED_LOGS = 10


class SeedProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    hour_intensity: tuple[float, ...]
    per_app_durations_s: dict[str, tuple[int, ...]]
    app_freq_by_hour: dict[int, dict[str, float]]
    total_logs: int = Field(gt=0)

    @model_validator(mode="after")
    def _consistent(self) -> "SeedProfile":
        if len(self.hour_intensity) != 24:
            raise ValueError("hour_intensity needs 24 weights")
        if any(w < 0 for w in self.hour_intensity) or sum(self.hour_intensity) <= 0:
            raise ValueError("hour_intensity must be non-negative with a positive sum")
        for apps in self.app_freq_by_hour.values():
            for app in apps:
                if not self.per_app_durations_s.get(app):
                    raise ValueError(f"app {app!r} has no duration sample")
        return self

    @property
    def duration_range_s(self) -> tuple[int, int]:
        values = [d for sample in self.per_app_durations_s.values() for d in sample]
        return min(values), max(values)


class GenConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    target_log_count: int | None = Field(None, gt=0)
    seed_value: int = Field(0, ge=0)
    duration_jitter_pct: float = Field(20.0, ge=0.0, le=100.0)
    quiet_window: tuple[int, int] | None = (1, 8)
    duration_strategy: Literal["empirical", "uniform"] = "empirical"

    @field_validator("quiet_window")
    @classmethod
    def _hours_in_day(cls, value: tuple[int, int] | None) -> tuple[int, int] | None:
        if value is not None and not all(0 <= h < 24 for h in value):
            raise ValueError("quiet window hours must be in [0, 24)")
        return value

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "GenConfig":
        quiet = None
        if settings.quiet_window_start_hour is not None:
            quiet = (settings.quiet_window_start_hour, settings.quiet_window_end_hour)
        values = {
            "target_log_count": settings.target_log_count,
            "seed_value": settings.seed_value,
            "duration_jitter_pct": settings.duration_jitter_pct,
            "quiet_window": quiet,
            "duration_strategy": settings.duration_strategy,
        }
        values.update(overrides)
        return cls(**values)


def quiet_hours(window: tuple[int, int] | None) -> set[int]:
    """Hours covered by [start, end); wraps past midnight when start > end."""
    if window is None:
        return set()
    start, end = window
    if start <= end:
        return set(range(start, end))
    return set(range(start, 24)) | set(range(0, end))


def profile_seed(seed: UsageDataset) -> SeedProfile:
    """Empirical tables counted exactly from the seed logs."""
    if len(seed.logs) < MIN_SEED_LOGS:
        raise SeedProfileError(f"seed has {len(seed.logs)} logs, at least {MIN_SEED_LOGS} needed")
    if not seed.has_time_of_day:
        raise SeedProfileError("seed timestamps have no time-of-day")

    hours = Counter(log.start.hour for log in seed.logs)
    by_hour: dict[int, Counter] = defaultdict(Counter)
    durations: dict[str, list[int]] = defaultdict(list)
    for log in seed.logs:
        by_hour[log.start.hour][log.app_id] += 1
        durations[log.app_id].append(log.duration_s)

    profile = SeedProfile(
        hour_intensity=tuple(float(hours.get(h, 0)) for h in range(24)),
        per_app_durations_s={app: tuple(sample) for app, sample in sorted(durations.items())},
        app_freq_by_hour={
            hour: {app: float(n) for app, n in sorted(apps.items())}
            for hour, apps in sorted(by_hour.items())
        },
        total_logs=len(seed.logs),
    )
    logger.info(f"Profiled seed: {profile.total_logs} logs, {len(profile.per_app_durations_s)} apps")
    return profile


def _rng(seed_value: int, day: date) -> np.random.Generator:
    return np.random.default_rng([seed_value, day.toordinal()])


def generate_day(profile: SeedProfile, day: date, config: GenConfig | None = None) -> UsageDataset:
    config = config or GenConfig()
    rng = _rng(config.seed_value, day)

    weights = np.asarray(profile.hour_intensity, dtype=np.float64)
    for hour in quiet_hours(config.quiet_window):
        weights[hour] = 0.0
    if weights.sum() <= 0:
        raise GenerationError("no hour outside the quiet window has seed activity")

    count = config.target_log_count or profile.total_logs
    hours = rng.choice(24, size=count, p=weights / weights.sum())
    offsets = rng.integers(0, 3600, size=count)
    low, high = profile.duration_range_s
    jitter = config.duration_jitter_pct / 100

    midnight = datetime.combine(day, datetime.min.time())
    drawn: list[tuple[datetime, str, int]] = []
    for hour, offset in zip(hours, offsets):
        apps = profile.app_freq_by_hour[int(hour)]
        names = sorted(apps)
        p = np.asarray([apps[n] for n in names], dtype=np.float64)
        app = names[int(rng.choice(len(names), p=p / p.sum()))]

        if config.duration_strategy == "uniform":
            duration = int(rng.integers(low, high + 1))
        else:
            sample = profile.per_app_durations_s[app]
            base = sample[int(rng.integers(len(sample)))]
            duration = max(0, int(round(base * (1 + rng.uniform(-jitter, jitter)))))

        drawn.append((midnight + timedelta(hours=int(hour), seconds=int(offset)), app, duration))

    drawn.sort(key=lambda item: (item[0], item[1]))
    logs = [
        UsageLog(id=str(idx), start=start, app_id=app, duration_s=duration)
        for idx, (start, app, duration) in enumerate(drawn, start=1)
    ]
    dataset = UsageDataset(
        logs=tuple(logs),
        provenance=Provenance(origin=Origin.BASELINE, source=f"baseline:{day.isoformat()}"),
    )
    logger.debug(f"Generated {len(logs)} baseline logs for {day}")
    return dataset


def generate_batch(
    profile: SeedProfile,
    dates: list[date],
    config: GenConfig | None = None,
) -> list[UsageDataset]:
    """One independent day per date; the result for a date does not depend on its neighbours."""
    if not dates:
        raise GenerationError("generate_batch needs at least one date")
    return [generate_day(profile, day, config) for day in dates]
