"""
Dataset builders shared by the test modules.

The TABLE_FIXTURES rebuild eight known generation outcomes (two attempts
per prompt). Each fixture has the recorded total usage, longest inactivity
interval and top-5 app mix, laid out on 2025-04-18.
"""

from dataclasses import dataclass
from datetime import datetime, timedelta

from usage_synth.models.usage import (
    Origin,
    PromptLabel,
    Provenance,
    UsageDataset,
    UsageLog,
)
from usage_synth.services.usage_csv import bundled_seed_csv, parse_dataset

HEADER = "id,created-at,app-id,time-seconds"
FIXTURE_DAY = "2025-04-18"

SEED_TOP5 = ["Chrome", "Maps", "Lichess", "WhatsApp", "Instagram"]

# Filler apps that never collide with any fixture's top-5
OTHER_APPS = [
    "Gmail", "Calendar", "Clock", "Settings", "Photos", "Phone", "Contacts", "Files",
    "Calculator", "Weather", "Uber", "Reddit", "Duolingo", "Telegram", "Signal", "Drive",
]


def make_logs(rows: list[tuple[str, str, int]], day: str = FIXTURE_DAY) -> tuple[UsageLog, ...]:
    """rows of (HH:MM:SS, app, duration_s); ids are 1..n in row order."""
    return tuple(
        UsageLog(id=str(idx), start=datetime.fromisoformat(f"{day}T{clock}"), app_id=app, duration_s=dur)
        for idx, (clock, app, dur) in enumerate(rows, start=1)
    )


def make_dataset(
    rows: list[tuple[str, str, int]],
    day: str = FIXTURE_DAY,
    provenance: Provenance | None = None,
) -> UsageDataset:
    return UsageDataset(logs=make_logs(rows, day), provenance=provenance or Provenance())


def csv_text(rows: list[tuple], header: str = HEADER) -> str:
    return header + "\n" + "".join(",".join(str(v) for v in row) + "\n" for row in rows)


def seed_dataset() -> UsageDataset:
    return parse_dataset(bundled_seed_csv(), Provenance(origin=Origin.REAL, source="seed"))


# --- Generation outcome fixtures ---

@dataclass(frozen=True)
class TableFixture:
    label: str
    total_s: int
    longest_gap_s: int | None  # None: date-only timestamps; 0: back-to-back usage
    top5: tuple[str, ...]
    other_count: int
    expected_hours: float
    expected_overlap_pct: float
    b2_passes: bool | None  # None: not assessable


TABLE_FIXTURES = [
    TableFixture("P1.1", 24_120, 27_197, ("TikTok", "YouTube", "Spotify", "Netflix", "Twitter"),
                 10, 6.7, 0.0, True),
    TableFixture("P1.2", 7_200, 30_600, ("Instagram", "Camera", "Messages", "Notes", "YouTube"),
                 8, 2.0, 20.0, True),
    TableFixture("P2.1", 152_280, 20_460,
                 ("Google Chrome", "Google Maps", "Lichess", "Whatsapp", "Instagram"),
                 5, 42.3, 100.0, True),
    TableFixture("P2.2", 5_760, None, tuple(SEED_TOP5), 13, 1.6, 100.0, None),
    TableFixture("P3.1", 22_680, 28_320, ("Google Chrome", "Slack", "Spotify", "YouTube", "Netflix"),
                 5, 6.3, 20.0, True),
    TableFixture("P3.2", 20_880, 27_600,
                 ("Google Chrome", "Google Maps", "Instagram", "Spotify", "YouTube"),
                 4, 5.8, 60.0, True),
    TableFixture("P4.1", 57_240, 0, tuple(SEED_TOP5), 0, 15.9, 100.0, False),
    TableFixture("P4.2", 32_040, 0, tuple(SEED_TOP5), 11, 8.9, 100.0, False),
]


def _split(total: int, n: int) -> list[int]:
    base, rest = divmod(total, n)
    return [base + 1 if i < rest else base for i in range(n)]


def _apps(fixture: TableFixture) -> list[str]:
    others = [app for app in OTHER_APPS if app not in fixture.top5][: fixture.other_count]
    return list(fixture.top5) * 3 + others


def _clock(offset_s: int) -> str:
    return (datetime.fromisoformat(f"{FIXTURE_DAY}T00:00:00") + timedelta(seconds=offset_s)).isoformat()


def table_fixture_csv(fixture: TableFixture) -> str:
    if fixture.label == "P4.1":
        # the seed day's (app, duration) pairs three times over, back to back from 06:00
        seed = seed_dataset()
        pairs = [(log.app_id, log.duration_s) for log in seed.logs] * 3
        return _back_to_back(pairs)

    apps = _apps(fixture)
    durations = _split(fixture.total_s, len(apps))
    pairs = list(zip(apps, durations))

    if fixture.longest_gap_s is None:
        return csv_text([(i, FIXTURE_DAY, app, d) for i, (app, d) in enumerate(pairs, start=1)])
    if fixture.longest_gap_s == 0:
        return _back_to_back(pairs)

    # first log at 00:05, the long gap after it, then the rest evenly up to 23:00
    starts = [300, 300 + durations[0] + fixture.longest_gap_s]
    step = (82_800 - starts[1]) // (len(pairs) - 2)
    starts += [starts[1] + step * i for i in range(1, len(pairs) - 1)]
    return csv_text([
        (i, _clock(start), app, d)
        for i, (start, (app, d)) in enumerate(zip(starts, pairs), start=1)
    ])


def _back_to_back(pairs: list[tuple[str, int]]) -> str:
    rows = []
    offset = 6 * 3600
    for i, (app, d) in enumerate(pairs, start=1):
        rows.append((i, _clock(offset), app, d))
        offset += d
    return csv_text(rows)


def table_fixture(fixture: TableFixture) -> UsageDataset:
    label, attempt = fixture.label.split(".")
    provenance = Provenance(
        origin=Origin.SYNTHETIC,
        prompt_label=PromptLabel(label),
        attempt=int(attempt),
        reply_count=1,
    )
    return parse_dataset(table_fixture_csv(fixture), provenance)
