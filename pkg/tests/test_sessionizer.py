from datetime import datetime, timedelta

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from usage_synth.core.exceptions import SessionizeError
from usage_synth.models.usage import UsageDataset, UsageLog
from usage_synth.services.sessionizer import log_level_units, session_gaps, sessionize
from usage_synth.services.usage_csv import parse_dataset

from tests.builders import csv_text, make_dataset


def partition(sessions) -> list[list[str]]:
    return [[log.id for log in s.logs] for s in sessions]


def brute_force_partition(dataset: UsageDataset, threshold: int) -> list[list[str]]:
    """
    O(n^2) reference: two logs are linked when one starts less than
    `threshold` seconds after the other's activity ends (or during it).
    Sessions are the connected components of that relation.
    """
    logs = dataset.logs
    n = len(logs)
    base = logs[0].start
    starts = np.array([(log.start - base).total_seconds() for log in logs])
    ends = np.array([(log.end - base).total_seconds() for log in logs])
    # i -> j linked when j starts at or after i starts and before i.end + threshold
    linked = (starts[None, :] >= starts[:, None]) & (starts[None, :] - ends[:, None] < threshold)
    _, labels = connected_components(csr_matrix(linked), directed=False)
    groups: dict[int, list[str]] = {}
    for idx in range(n):
        groups.setdefault(int(labels[idx]), []).append(logs[idx].id)
    return sorted(groups.values(), key=lambda ids: int(ids[0]))


def random_dataset(rng: np.random.Generator, n: int) -> UsageDataset:
    # gaps straddle the 60 s boundary, with some exact hits and some overlaps
    gap_choices = np.array([-30, 0, 1, 30, 59, 60, 61, 90, 600])
    durations = rng.integers(0, 300, size=n)
    gaps = rng.choice(gap_choices, size=n)
    start = datetime(2025, 4, 18)
    logs = []
    for i in range(n):
        logs.append(UsageLog(id=str(i + 1), start=start, app_id="App", duration_s=int(durations[i])))
        start = start + timedelta(seconds=max(0, int(durations[i]) + int(gaps[i])))
    return UsageDataset(logs=tuple(logs))


class TestSessionize:
    def test_single_log(self):
        dataset = make_dataset([("08:00:00", "WhatsApp", 20)])
        sessions = sessionize(dataset)
        assert len(sessions) == 1
        assert sessions[0].start == datetime(2025, 4, 18, 8, 0, 0)
        assert sessions[0].end == datetime(2025, 4, 18, 8, 0, 20)
        assert sessions[0].active_s == sessions[0].span_s == 20

    @pytest.mark.parametrize("gap, expected", [(59, 1), (60, 2), (61, 2)])
    def test_threshold_boundary(self, gap, expected):
        second = (datetime(2025, 4, 18, 8, 0, 20) + timedelta(seconds=gap)).strftime("%H:%M:%S")
        dataset = make_dataset([("08:00:00", "A", 20), (second, "B", 10)])
        assert len(sessionize(dataset, 60)) == expected

    def test_session_end_is_max_member_end(self):
        dataset = make_dataset([("08:00:00", "A", 600), ("08:01:00", "B", 30), ("08:10:30", "C", 5)])
        sessions = sessionize(dataset)
        assert len(sessions) == 1
        assert sessions[0].end == datetime(2025, 4, 18, 8, 10, 35)
        assert sessions[0].active_s == 635

    def test_overlapped_tail_does_not_split(self):
        # B starts 100 s after the short log C ended, but A is still active
        dataset = make_dataset([("08:00:00", "A", 600), ("08:01:00", "C", 10), ("08:02:50", "B", 5)])
        assert len(sessionize(dataset)) == 1

    def test_date_only_rejected(self):
        dataset = parse_dataset(csv_text([(1, "2025-04-18", "A", 10), (2, "2025-04-18", "B", 10)]))
        with pytest.raises(SessionizeError):
            sessionize(dataset)

    def test_threshold_zero_splits_positive_gaps(self):
        dataset = make_dataset([("08:00:00", "A", 10), ("08:00:11", "B", 10), ("08:00:30", "C", 1)])
        assert len(sessionize(dataset, 0)) == 3

    def test_huge_threshold_gives_one_session(self):
        dataset = make_dataset([("01:00:00", "A", 10), ("12:00:00", "B", 10), ("23:00:00", "C", 1)])
        assert len(sessionize(dataset, 10**9)) == 1

    def test_oracle_equivalence(self):
        rng = np.random.default_rng(60)
        for _ in range(1000):
            n = int(rng.integers(1, 1001)) if rng.random() < 0.05 else int(rng.integers(1, 60))
            dataset = random_dataset(rng, n)
            sessions = sessionize(dataset, 60)
            assert partition(sessions) == brute_force_partition(dataset, 60)
            assert sum(len(s.logs) for s in sessions) == len(dataset.logs)
            assert all(g >= 60 for g in session_gaps(sessions).gaps_s)

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            dataset = random_dataset(rng, int(rng.integers(2, 200)))
            counts = [len(sessionize(dataset, t)) for t in (0, 30, 60, 120, 3600)]
            assert counts == sorted(counts, reverse=True)


class TestLogLevelUnits:
    def test_gap_from_activity_end(self):
        dataset = make_dataset([("08:00:00", "A", 20), ("08:05:00", "B", 10)])
        durations, gaps = log_level_units(dataset)
        assert durations == [20, 10]
        assert gaps.gaps_s == (280,)

    def test_overlap_clamped(self, caplog):
        dataset = make_dataset([("08:00:00", "A", 600), ("08:05:00", "B", 10)])
        _, gaps = log_level_units(dataset)
        assert gaps.gaps_s == (0,)
        assert gaps.clamped == 1
        assert "Clamped 1" in caplog.text

    def test_single_log_has_no_gaps(self):
        _, gaps = log_level_units(make_dataset([("08:00:00", "A", 20)]))
        assert gaps.gaps_s == ()


class TestSessionGaps:
    def test_hour_between_sessions(self):
        dataset = make_dataset([("08:00:00", "A", 3600), ("10:00:00", "B", 10)])
        assert session_gaps(sessionize(dataset)).gaps_s == (3600,)

    def test_one_session(self):
        assert session_gaps(sessionize(make_dataset([("08:00:00", "A", 1)]))).gaps_s == ()
