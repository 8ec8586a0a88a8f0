from usage_synth.models.reports import Status
from usage_synth.models.usage import FindingCode, Provenance
from usage_synth.services.compliance import check_s1, check_s2, check_s3, evaluate_compliance
from usage_synth.services.usage_csv import parse_dataset

from tests.builders import csv_text, make_dataset


SUMMARY_APPS = ["Instagram", "Camera", "Messages", "Notes", "YouTube", "Gmail", "Spotify"]


class TestS1:
    def test_clean_dataset_passes(self, seed):
        assert check_s1(seed).status == Status.PASS

    def test_date_only_fails(self):
        dataset = parse_dataset(csv_text([(1, "2025-04-18", "A", 10), (2, "2025-04-18", "B", 10)]))
        result = check_s1(dataset)
        assert result.status == Status.FAIL
        assert {f.code for f in result.findings} == {FindingCode.DATE_ONLY_TIMESTAMP}

    def test_negative_duration_fails_with_row(self):
        rows = [
            (1, "2025-04-18T08:00:00", "A", 10),
            (2, "2025-04-18T08:10:00", "B", -3),
            (3, "2025-04-18T08:20:00", "C", 10),
        ]
        result = check_s1(parse_dataset(csv_text(rows)))
        assert result.status == Status.FAIL
        assert result.findings[0].code == FindingCode.NEGATIVE_DURATION
        assert result.findings[0].row == 2

    def test_duplicate_id_fails(self):
        rows = [(7, "2025-04-18T08:00:00", "A", 10), (7, "2025-04-18T08:10:00", "B", 10)]
        assert check_s1(parse_dataset(csv_text(rows))).status == Status.FAIL

    def test_malformed_rows_fail(self):
        text = csv_text([(1, "2025-04-18T08:00:00", "A", 10), (2, "2025-04-18T08:10:00", "B", 10)])
        text += "3,2025-04-18T08:20:00,C\n4,2025-04-18T08:30:00,D,42,7\n"
        result = check_s1(parse_dataset(text))
        assert result.status == Status.FAIL
        assert {f.code for f in result.findings} == {FindingCode.MALFORMED_ROW, FindingCode.EXTRA_FIELDS}

    def test_unrepresentable_duration_fails(self):
        rows = [(1, "2025-04-18T08:00:00", "A", 10), (2, "2025-04-18T09:00:00", "B", 10**12)]
        result = check_s1(parse_dataset(csv_text(rows)))
        assert result.status == Status.FAIL
        assert result.findings[0].code == FindingCode.DURATION_OUT_OF_RANGE

    def test_unsorted_and_overlap_do_not_fail(self):
        rows = [(2, "2025-04-18T08:05:00", "B", 10), (1, "2025-04-18T08:00:00", "A", 600)]
        dataset = parse_dataset(csv_text(rows))
        assert dataset.has_finding(FindingCode.UNSORTED_INPUT)
        assert dataset.has_finding(FindingCode.OVERLAP_WARNING)
        assert check_s1(dataset).status == Status.PASS


class TestS2:
    def test_per_event_logs_pass(self, seed):
        result = check_s2(seed)
        assert result.status == Status.PASS
        assert "heuristic" in result.detail

    def test_usage_summary_fails(self):
        rows = [(i, "2025-04-18T00:00:00", app, 3600 + i * 300) for i, app in enumerate(SUMMARY_APPS, 1)]
        result = check_s2(parse_dataset(csv_text(rows)))
        assert result.status == Status.FAIL
        assert result.findings[0].code == FindingCode.AGGREGATED_ROWS

    def test_date_only_summary_fails(self):
        rows = [(i, "2025-04-18", app, 5400) for i, app in enumerate(SUMMARY_APPS, 1)]
        assert check_s2(parse_dataset(csv_text(rows))).status == Status.FAIL

    def test_multi_day_summary_fails(self):
        rows = [
            (1, "2025-04-18T00:00:00", "Instagram", 7200),
            (2, "2025-04-18T00:00:00", "YouTube", 5400),
            (3, "2025-04-19T12:00:00", "Instagram", 6000),
            (4, "2025-04-19T12:00:00", "YouTube", 4000),
        ]
        result = check_s2(parse_dataset(csv_text(rows)))
        assert result.status == Status.FAIL
        assert "uninformative_timestamps=True" in result.detail

    def test_light_day_one_row_per_app_passes(self):
        dataset = make_dataset([
            ("08:00:00", "WhatsApp", 40),
            ("12:30:00", "Maps", 300),
            ("19:45:00", "Instagram", 200),
        ])
        assert check_s2(dataset).status == Status.PASS

    def test_long_rows_with_distinct_times_pass(self):
        dataset = make_dataset([("08:00:00", "Netflix", 5400), ("20:00:00", "YouTube", 3600)])
        assert check_s2(dataset).status == Status.PASS

    def test_repeated_app_never_fires(self):
        rows = [(i, "2025-04-18T00:00:00", app, 7200) for i, app in enumerate(SUMMARY_APPS, 1)]
        rows.append((99, "2025-04-18T13:00:00", "Instagram", 7200))
        assert check_s2(parse_dataset(csv_text(rows))).status == Status.PASS

    def test_empty_dataset_passes(self):
        assert check_s2(make_dataset([])).status == Status.PASS


class TestS3:
    def test_single_reply_passes(self):
        dataset = make_dataset([("08:00:00", "A", 1)], provenance=Provenance(reply_count=1))
        assert check_s3(dataset).status == Status.PASS

    def test_two_replies_fail(self):
        dataset = make_dataset([("08:00:00", "A", 1)], provenance=Provenance(reply_count=2))
        assert check_s3(dataset).status == Status.FAIL

    def test_unknown_reply_count(self):
        assert check_s3(make_dataset([("08:00:00", "A", 1)])).status == Status.NOT_ASSESSABLE


def test_compliance_is_deterministic(seed):
    assert evaluate_compliance(seed) == evaluate_compliance(seed)
