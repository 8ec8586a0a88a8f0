from datetime import datetime

import pytest

from usage_synth.core.exceptions import MetricNotAssessable
from usage_synth.models.reports import Status
from usage_synth.models.usage import UsageDataset, UsageLog
from usage_synth.services.realism import (
    RealismConfig,
    app_stats,
    canonical_app,
    check_b1,
    check_b2,
    check_b3,
    evaluate_realism,
    inactivity_gaps,
    longest_gap,
    novel_apps,
    sleep_overlap_s,
    top_k_overlap,
    total_usage,
    unit_series,
)
from usage_synth.services.usage_csv import parse_dataset

from tests.builders import SEED_TOP5, csv_text, make_dataset


def one_day(hours: float) -> UsageDataset:
    return make_dataset([("09:00:00", "Chrome", int(hours * 3600))])


class TestB1:
    def test_seed_total(self, seed):
        assert total_usage(seed) == 5.3
        assert check_b1(seed).status == Status.PASS

    @pytest.mark.parametrize("hours, status", [
        (0.99, Status.FAIL), (1.0, Status.PASS), (20.0, Status.PASS), (20.01, Status.FAIL),
    ])
    def test_bounds_inclusive(self, hours, status):
        assert check_b1(one_day(hours)).status == status

    def test_every_day_must_be_in_range(self):
        logs = (
            UsageLog(id="1", start=datetime(2025, 4, 18, 9), app_id="Chrome", duration_s=7200),
            UsageLog(id="2", start=datetime(2025, 4, 19, 9), app_id="Chrome", duration_s=600),
        )
        result = check_b1(UsageDataset(logs=logs))
        assert result.status == Status.FAIL
        assert "2025-04-19" in result.detail
        assert result.total_usage_h == 2.2

    def test_date_only_still_assessed(self):
        dataset = parse_dataset(csv_text([(1, "2025-04-18", "Chrome", 7200)]))
        assert check_b1(dataset).status == Status.PASS


class TestB2:
    def test_seed_night_gap(self, seed):
        gap = longest_gap(seed)
        assert gap.gap_s == 27_990
        assert gap.gap_start == datetime(2025, 4, 17, 0, 33, 30)
        assert gap.gap_end == datetime(2025, 4, 17, 8, 20)
        result = check_b2(seed)
        assert result.status == Status.PASS
        assert result.sleep_overlap_s == 27_990

    def test_long_daytime_gap_fails(self):
        dataset = make_dataset([("10:30:00", "Chrome", 600), ("16:40:00", "Maps", 600)])
        result = check_b2(dataset)
        assert longest_gap(dataset).gap_s > 18_000
        assert result.status == Status.FAIL
        assert result.sleep_overlap_s == 0

    def test_evening_gap_partially_inside_window(self):
        # 17:00 -> 02:00 overlaps 20:00 -> 02:00, six hours
        overlap = sleep_overlap_s(datetime(2025, 4, 18, 17), datetime(2025, 4, 19, 2))
        assert overlap == 6 * 3600

    def test_gap_spanning_two_nights_counts_one(self):
        overlap = sleep_overlap_s(datetime(2025, 4, 18, 22), datetime(2025, 4, 20, 1))
        assert overlap == 12 * 3600

    def test_exactly_five_hours_passes(self):
        dataset = make_dataset([("00:00:00", "A", 0), ("05:00:00", "B", 10)])
        assert check_b2(dataset).status == Status.PASS

    def test_back_to_back_fails(self):
        dataset = make_dataset([("08:00:00", "A", 60), ("08:01:00", "B", 60)])
        result = check_b2(dataset)
        assert result.status == Status.FAIL
        assert result.longest_gap_s == 0

    def test_date_only_not_assessable(self):
        dataset = parse_dataset(csv_text([(1, "2025-04-18", "A", 10), (2, "2025-04-18", "B", 10)]))
        assert check_b2(dataset).status == Status.NOT_ASSESSABLE
        with pytest.raises(MetricNotAssessable):
            inactivity_gaps(dataset)

    def test_gap_measured_from_running_end(self):
        dataset = make_dataset([("08:00:00", "A", 3600), ("08:10:00", "B", 10), ("09:30:00", "C", 10)])
        assert inactivity_gaps(dataset) == [(datetime(2025, 4, 18, 9), datetime(2025, 4, 18, 9, 30))]

    def test_removing_a_log_never_shrinks_longest_gap(self, seed):
        base = longest_gap(seed).gap_s
        for idx in range(1, len(seed.logs) - 1, 7):
            logs = seed.logs[:idx] + seed.logs[idx + 1:]
            assert longest_gap(UsageDataset(logs=logs)).gap_s >= base


class TestB3:
    def test_seed_apps(self, seed):
        stats = app_stats(seed, 5)
        assert stats.app_count == 33
        assert stats.top_k == SEED_TOP5
        assert stats.per_app_time_s["Chrome"] == 5400

    def test_ties_broken_by_name(self):
        dataset = make_dataset([
            ("08:00:00", "Zoom", 60), ("09:00:00", "Atlas", 60), ("10:00:00", "Mail", 30),
        ])
        assert app_stats(dataset, 2).top_k == ["Atlas", "Zoom"]

    def test_self_overlap_is_full(self, seed):
        assert top_k_overlap(seed, seed, 5) == 100.0

    def test_aliases_match_vendor_names(self, realism_config):
        assert canonical_app("Google Chrome", realism_config.app_aliases) == "chrome"
        assert canonical_app("  WHATSAPP ") == "whatsapp"

    def test_k_larger_than_app_count(self, seed):
        dataset = make_dataset([("08:00:00", "Chrome", 60)])
        with pytest.raises(MetricNotAssessable):
            top_k_overlap(dataset, seed, 5)

    def test_novel_apps(self, seed):
        dataset = make_dataset([("08:00:00", "Chrome", 300), ("09:00:00", "Slack", 100)])
        novel, share = novel_apps(dataset, seed)
        assert novel == ["Slack"]
        assert share == 25.0

    def test_without_seed_reports_counts(self, seed):
        result = check_b3(seed, None)
        assert result.status == Status.REPORT_ONLY
        assert result.app_count == 33
        assert result.top_k_overlap_pct is None

    def test_small_dataset_not_assessable(self, seed):
        dataset = make_dataset([("08:00:00", "Chrome", 60), ("09:00:00", "Maps", 60)])
        result = check_b3(dataset, seed)
        assert result.status == Status.NOT_ASSESSABLE
        assert result.app_count == 2


class TestUnitSeries:
    def test_unknown_series(self, seed):
        with pytest.raises(ValueError):
            unit_series(seed, "idle", "log")

    def test_log_durations_need_no_time_of_day(self):
        dataset = parse_dataset(csv_text([(1, "2025-04-18", "A", 10), (2, "2025-04-18", "B", 20)]))
        assert unit_series(dataset, "duration", "log") == [10, 20]
        with pytest.raises(MetricNotAssessable):
            unit_series(dataset, "gap", "log")
        with pytest.raises(MetricNotAssessable):
            unit_series(dataset, "duration", "session")


class TestEvaluateRealism:
    def test_self_comparison_is_zero(self, seed, realism_config):
        report = evaluate_realism(seed, seed, realism_config)
        for criterion in (report.b4, report.b5):
            assert criterion.status == Status.REPORT_ONLY
            for level in (criterion.log_level, criterion.session_level):
                assert level.ks_stat == 0.0
                assert level.wasserstein_log10 == 0.0
                assert level.per_reference[0].label == seed.label
        assert report.b3.top_k_overlap_pct == 100.0

    def test_threshold_turns_comparison_into_pass_fail(self, seed):
        config = RealismConfig(ks_fail_threshold=0.5)
        assert evaluate_realism(seed, seed, config).b4.status == Status.PASS
        other = make_dataset([("08:00:00", "Chrome", 5000), ("20:00:00", "Chrome", 5000)])
        assert evaluate_realism(other, seed, config).b4.status == Status.FAIL

    def test_date_only_degrades_per_metric(self, seed):
        dataset = parse_dataset(csv_text([(i, "2025-04-18", "Chrome", 1800) for i in range(1, 5)]))
        report = evaluate_realism(dataset, seed)
        assert report.b1.status == Status.PASS
        assert report.b2.status == Status.NOT_ASSESSABLE
        assert report.b4.log_level.status == Status.REPORT_ONLY
        assert report.b4.session_level.status == Status.NOT_ASSESSABLE
        assert report.b5.status == Status.NOT_ASSESSABLE

    def test_no_seed(self, seed):
        report = evaluate_realism(seed)
        assert report.b4.log_level.ks_stat is None
        assert report.b4.log_level.n == 135
