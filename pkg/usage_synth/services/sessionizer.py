"""
Sessionizer

Two ways of turning logs into units of usage:

  * log level     - every log is its own unit
  * session level - consecutive logs merge while the inactivity between the
                    running session end and the next start stays below the
                    gap threshold (default 60 s); a gap equal to the threshold
                    splits

Inactivity is measured from activity end (start + duration), never
start-to-start. Negative inactivity (overlapping logs) is clamped to zero.
"""

import logging
from datetime import datetime

from pydantic import BaseModel, ConfigDict

from usage_synth.core.exceptions import SessionizeError
from usage_synth.models.usage import UsageDataset, UsageLog

logger = logging.getLogger(__name__)

DEFAULT_GAP_THRESHOLD_S = 60


class Session(BaseModel):
    model_config = ConfigDict(frozen=True)

    start: datetime
    end: datetime
    logs: tuple[UsageLog, ...]

    @property
    def active_s(self) -> int:
        return sum(log.duration_s for log in self.logs)

    @property
    def span_s(self) -> int:
        return int((self.end - self.start).total_seconds())


class GapSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    gaps_s: tuple[int, ...] = ()
    clamped: int = 0  # how many negative gaps were raised to 0


def _require_time_of_day(dataset: UsageDataset) -> None:
    if not dataset.has_time_of_day:
        raise SessionizeError("dataset has date-only timestamps; gaps and sessions are undefined")


def _seconds(later: datetime, earlier: datetime) -> int:
    return int((later - earlier).total_seconds())


def sessionize(dataset: UsageDataset, gap_threshold_s: int = DEFAULT_GAP_THRESHOLD_S) -> list[Session]:
    """Group a normalized dataset into sessions covering every log exactly once, in order."""
    _require_time_of_day(dataset)
    if gap_threshold_s < 0:
        raise ValueError("gap_threshold_s must be >= 0")

    sessions: list[Session] = []
    members: list[UsageLog] = []
    session_end: datetime | None = None

    for log in dataset.logs:
        if members and _seconds(log.start, session_end) >= gap_threshold_s:
            sessions.append(Session(start=members[0].start, end=session_end, logs=tuple(members)))
            members = []
            session_end = None
        members.append(log)
        if session_end is None or log.end > session_end:
            session_end = log.end

    if members:
        sessions.append(Session(start=members[0].start, end=session_end, logs=tuple(members)))

    logger.debug(f"Grouped {len(dataset.logs)} logs into {len(sessions)} sessions")
    return sessions


def log_level_units(dataset: UsageDataset) -> tuple[list[int], GapSeries]:
    """Per-log durations and the gaps between consecutive logs (clamped at 0)."""
    _require_time_of_day(dataset)
    durations = [log.duration_s for log in dataset.logs]

    gaps: list[int] = []
    clamped = 0
    for prev, nxt in zip(dataset.logs, dataset.logs[1:]):
        gap = _seconds(nxt.start, prev.end)
        if gap < 0:
            clamped += 1
            gap = 0
        gaps.append(gap)

    if clamped:
        logger.warning(f"Clamped {clamped} negative inter-log gaps to 0 (overlapping logs)")
    return durations, GapSeries(gaps_s=tuple(gaps), clamped=clamped)


def session_gaps(sessions: list[Session]) -> GapSeries:
    """Inactivity between consecutive sessions."""
    gaps: list[int] = []
    clamped = 0
    for prev, nxt in zip(sessions, sessions[1:]):
        gap = _seconds(nxt.start, prev.end)
        if gap < 0:
            clamped += 1
            gap = 0
        gaps.append(gap)
    if clamped:
        logger.warning(f"Clamped {clamped} negative session gaps to 0")
    return GapSeries(gaps_s=tuple(gaps), clamped=clamped)
