"""
usage-synth command line

    usage-synth check DATASET [--seed SEED] [--reference REF ...]
    usage-synth summarize DATASET [DATASET ...] [--seed SEED]
    usage-synth generate-baseline [--seed SEED] [--date 2025-04-18] [--days N] --out PATH
    usage-synth prompt {P1,P2,P3,P4} [--seed SEED] --out PATH
    usage-synth run {P1,P2,P3,P4} [--seed SEED] [--attempts N] [--mock [--mock-reply FILE ...]]
    usage-synth histogram DATASET --mode {log,session} --kind {duration,gap} [--out PATH]
    usage-synth self-prompt --out DIR [--mock]

Logging goes to stderr; stdout carries the summary tables.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

from pydantic import ValidationError

from usage_synth import __version__
from usage_synth.core.config import Settings, load_settings
from usage_synth.core.exceptions import (
    GenerationError,
    LLMClientError,
    MetricNotAssessable,
    PromptError,
    SeedProfileError,
    UsageParseError,
)
from usage_synth.models.usage import Origin, PromptLabel, Provenance, UsageDataset
from usage_synth.services.baseline_generator import GenConfig, generate_batch, profile_seed
from usage_synth.services.distributions import build_histogram, histogram_csv
from usage_synth.services.generation_pipeline import run_generation, self_prompt
from usage_synth.services.llm_client import ChatCompletionClient, MockChatTransport
from usage_synth.services.prompt_catalog import build_prompt, render_prompt
from usage_synth.services.realism import UNIT_KINDS, UNIT_LEVELS, app_stats, total_usage, unit_series
from usage_synth.services.report_writer import (
    ExitCode,
    comparison_row,
    evaluate_file,
    evaluate_text,
    fatal_report,
    format_comparison,
    format_summary,
    load_dataset,
    report_to_json,
    worst_exit_code,
    write_text_atomic,
)
from usage_synth.services.usage_csv import bundled_seed_csv, parse_dataset, write_dataset

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Flag attribute -> Settings field
SETTING_FLAGS = {
    "gap_threshold": "gap_threshold_s",
    "k": "top_k",
    "ks_fail_threshold": "ks_fail_threshold",
    "endpoint": "endpoint_url",
    "model": "model_name",
    "attempts": "attempts",
    "seed_value": "seed_value",
    "target_log_count": "target_log_count",
    "jitter": "duration_jitter_pct",
    "duration_strategy": "duration_strategy",
}


class CommandError(Exception):
    """Stops a command with a message and an exit code."""

    def __init__(self, message: str, code: ExitCode):
        self.code = code
        super().__init__(message)


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Flat KEY=value config file")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    evaluation = argparse.ArgumentParser(add_help=False)
    evaluation.add_argument("--seed", default=None, help="Seed dataset CSV (comparison reference)")
    evaluation.add_argument("--reference", action="append", default=[],
                            help="Extra real reference day for B4/B5 (repeatable)")
    evaluation.add_argument("--gap-threshold", dest="gap_threshold", type=int, default=None,
                            help="Session gap threshold in seconds (default 60)")
    evaluation.add_argument("--k", type=int, default=None, help="Top-k apps for B3 (default 5)")
    evaluation.add_argument("--ks-fail-threshold", dest="ks_fail_threshold", type=float, default=None,
                            help="Fail B4/B5 when KS exceeds this value (non-canonical)")
    evaluation.add_argument("--json-out", dest="json_out", default=None, help="JSON output path")

    endpoint = argparse.ArgumentParser(add_help=False)
    endpoint.add_argument("--endpoint", default=None, help="OpenAI-compatible base URL")
    endpoint.add_argument("--model", default=None, help="Model name")
    endpoint.add_argument("--mock", action="store_true", help="Use the local mock endpoint")
    endpoint.add_argument("--mock-reply", dest="mock_reply", action="append", default=[],
                          help="Reply file for the mock endpoint, served in order (repeatable)")

    parser = argparse.ArgumentParser(
        prog="usage-synth",
        description="Generate and evaluate synthetic smartphone app-usage datasets",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common, evaluation], help="Evaluate one dataset")
    check.add_argument("dataset")

    summarize = sub.add_parser("summarize", parents=[common, evaluation],
                               help="Evaluate several datasets side by side")
    summarize.add_argument("datasets", nargs="+")

    baseline = sub.add_parser("generate-baseline", parents=[common],
                              help="Resample a synthetic day from the seed")
    baseline.add_argument("--seed", default=None, help="Seed dataset CSV (default: bundled day)")
    baseline.add_argument("--date", type=date.fromisoformat, default=None,
                          help="First day to generate (default: day after the seed)")
    baseline.add_argument("--days", type=int, default=1, help="Number of consecutive days")
    baseline.add_argument("--seed-value", dest="seed_value", type=int, default=None)
    baseline.add_argument("--target-log-count", dest="target_log_count", type=int, default=None)
    baseline.add_argument("--jitter", type=float, default=None, help="Duration jitter in percent")
    baseline.add_argument("--duration-strategy", dest="duration_strategy",
                          choices=["empirical", "uniform"], default=None)
    baseline.add_argument("--out", required=True, help="CSV path (a directory when --days > 1)")

    prompt = sub.add_parser("prompt", parents=[common], help="Write a resolved prompt to a file")
    prompt.add_argument("label", choices=[label.value for label in PromptLabel])
    prompt.add_argument("--seed", default=None, help="Seed CSV, required for P2 and P4")
    prompt.add_argument("--out", required=True)

    run = sub.add_parser("run", parents=[common, evaluation, endpoint],
                         help="Generate datasets through the endpoint and evaluate them")
    run.add_argument("label", choices=[label.value for label in PromptLabel])
    run.add_argument("--attempts", type=int, default=None, help="Attempts (default 2)")
    run.add_argument("--out", default=None, help="Run directory root (default: output_dir)")

    histogram = sub.add_parser("histogram", parents=[common], help="Emit log-binned histogram CSV")
    histogram.add_argument("dataset")
    histogram.add_argument("--mode", choices=UNIT_LEVELS, default="session")
    histogram.add_argument("--kind", choices=UNIT_KINDS, default="duration")
    histogram.add_argument("--gap-threshold", dest="gap_threshold", type=int, default=None)
    histogram.add_argument("--out", default=None, help="CSV path (default: stdout)")

    meta = sub.add_parser("self-prompt", parents=[common, endpoint],
                          help="Ask the model to write the detailed prompts")
    meta.add_argument("--out", required=True, help="Directory for the generated prompt files")

    return parser


# --- Helpers ---

def _settings(args: argparse.Namespace) -> Settings:
    overrides = {field: getattr(args, flag, None) for flag, field in SETTING_FLAGS.items()}
    return load_settings(args.config, **overrides)


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CommandError(f"Cannot read {path}: {e}", ExitCode.USAGE_ERROR)


def _parse_real(text: str, source: str) -> UsageDataset:
    try:
        return parse_dataset(text, Provenance(origin=Origin.REAL, source=source))
    except UsageParseError as e:
        raise CommandError(f"Cannot parse {source}: {e}", ExitCode.FATAL_PARSE)


def _comparisons(args: argparse.Namespace) -> tuple[UsageDataset | None, list[UsageDataset]]:
    seed = _parse_real(_read(args.seed), args.seed) if args.seed else None
    references = [_parse_real(_read(path), path) for path in args.reference]
    return seed, references


def _transport(args: argparse.Namespace) -> MockChatTransport | None:
    if not args.mock:
        return None
    if args.mock_reply:
        replies = [_read(path) for path in args.mock_reply]
    else:
        replies = [resources.files("usage_synth").joinpath("data/mock_reply.txt").read_text(encoding="utf-8")]
    return MockChatTransport(replies)


def _default_json_out(settings: Settings, dataset: str) -> Path:
    return Path(settings.output_dir) / f"{Path(dataset).stem}.report.json"


# --- Commands ---

def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    seed, references = _comparisons(args)
    try:
        report = evaluate_file(Path(args.dataset), settings, seed, references)
    except OSError as e:
        raise CommandError(f"Cannot read {args.dataset}: {e}", ExitCode.USAGE_ERROR)

    out = Path(args.json_out) if args.json_out else _default_json_out(settings, args.dataset)
    write_text_atomic(out, report_to_json(report))
    print(format_summary(report))
    logger.info(f"Report written to {out}")
    return report.exit_code


def cmd_summarize(args: argparse.Namespace, settings: Settings) -> int:
    seed, references = _comparisons(args)

    def evaluate(path: str):
        try:
            return evaluate_file(Path(path), settings, seed, references)
        except OSError as e:
            raise CommandError(f"Cannot read {path}: {e}", ExitCode.USAGE_ERROR)

    with ThreadPoolExecutor(max_workers=min(8, len(args.datasets))) as pool:
        reports = list(pool.map(evaluate, args.datasets))

    rows = [comparison_row(Path(path).stem, report) for path, report in zip(args.datasets, reports)]
    print(format_comparison(rows))
    if args.json_out:
        payload = [row.model_dump() for row in rows]
        write_text_atomic(Path(args.json_out), json.dumps(payload, indent=2) + "\n")
    return worst_exit_code([row.exit_code for row in rows])


def cmd_generate_baseline(args: argparse.Namespace, settings: Settings) -> int:
    if args.days < 1:
        raise CommandError("--days must be at least 1", ExitCode.USAGE_ERROR)
    if args.seed:
        seed = _parse_real(_read(args.seed), args.seed)
    else:
        seed = _parse_real(bundled_seed_csv(), "bundled seed")

    try:
        profile = profile_seed(seed)
    except SeedProfileError as e:
        raise CommandError(str(e), ExitCode.CRITERIA_FAILED)
    config = GenConfig.from_settings(settings)

    first = args.date or (max(log.day for log in seed.logs) + timedelta(days=1))
    dates = [first + timedelta(days=offset) for offset in range(args.days)]
    try:
        days = generate_batch(profile, dates, config)
    except GenerationError as e:
        raise CommandError(str(e), ExitCode.CRITERIA_FAILED)

    out = Path(args.out)
    for day, dataset in zip(dates, days):
        path = out if args.days == 1 else out / f"baseline_{day.isoformat()}.csv"
        write_text_atomic(path, write_dataset(dataset))
        print(
            f"{path}: {len(dataset)} logs, {total_usage(dataset)} h, "
            f"{app_stats(dataset).app_count} apps"
        )
    return ExitCode.OK


def cmd_prompt(args: argparse.Namespace, settings: Settings) -> int:
    seed_csv = _read(args.seed) if args.seed else None
    try:
        spec = build_prompt(args.label, seed_csv)
    except PromptError as e:
        raise CommandError(str(e), ExitCode.CRITERIA_FAILED)
    path = write_text_atomic(Path(args.out), render_prompt(spec))
    print(f"{spec.label.value} prompt ({len(spec.messages)} message(s)) written to {path}")
    return ExitCode.OK


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    label = PromptLabel(args.label)
    seed, references = _comparisons(args)
    seed_csv = _read(args.seed) if args.seed and label in (PromptLabel.P2, PromptLabel.P4) else None
    try:
        spec = build_prompt(label, seed_csv)
    except PromptError as e:
        raise CommandError(str(e), ExitCode.CRITERIA_FAILED)

    out_dir = Path(args.out or settings.output_dir)
    rows = []
    codes: list[int] = []
    with ChatCompletionClient.from_settings(settings, transport=_transport(args)) as client:
        for attempt in range(1, settings.attempts + 1):
            try:
                run = run_generation(spec, client, attempt, out_dir)
            except LLMClientError as e:
                print(f"{label.value}.{attempt}: endpoint failure: {e}", file=sys.stderr)
                codes.append(ExitCode.ENDPOINT_FAILURE)
                break

            provenance = Provenance(
                origin=Origin.SYNTHETIC,
                prompt_label=label,
                attempt=attempt,
                reply_count=run.reply_count,
                source=run.run_dir,
            )
            if run.extracted_csv is None:
                report = fatal_report(run.extraction_error or "no CSV in reply", settings,
                                      run.run_dir, seed, references)
            else:
                report = evaluate_text(run.extracted_csv, provenance, settings, seed, references)
            write_text_atomic(Path(run.run_dir) / "report.json", report_to_json(report))
            rows.append(comparison_row(f"{label.value}.{attempt}", report))
            codes.append(report.exit_code)

    if rows:
        print(format_comparison(rows))
        summary = json.dumps([row.model_dump() for row in rows], indent=2) + "\n"
        write_text_atomic(out_dir / f"{label.value}_summary.json", summary)
        if args.json_out:
            write_text_atomic(Path(args.json_out), summary)
    return worst_exit_code(codes)


def cmd_histogram(args: argparse.Namespace, settings: Settings) -> int:
    try:
        dataset = load_dataset(Path(args.dataset))
    except OSError as e:
        raise CommandError(f"Cannot read {args.dataset}: {e}", ExitCode.USAGE_ERROR)
    except UsageParseError as e:
        raise CommandError(f"Cannot parse {args.dataset}: {e}", ExitCode.FATAL_PARSE)

    try:
        values = unit_series(dataset, args.kind, args.mode, settings.gap_threshold_s)
    except MetricNotAssessable as e:
        raise CommandError(f"{args.mode}-level {args.kind}s unavailable: {e}", ExitCode.CRITERIA_FAILED)

    text = histogram_csv(build_histogram(values))
    if args.out:
        write_text_atomic(Path(args.out), text)
        logger.info(f"Histogram of {len(values)} units written to {args.out}")
    else:
        sys.stdout.write(text)
    return ExitCode.OK


def cmd_self_prompt(args: argparse.Namespace, settings: Settings) -> int:
    with ChatCompletionClient.from_settings(settings, transport=_transport(args)) as client:
        try:
            result = self_prompt(client, Path(args.out))
        except LLMClientError as e:
            raise CommandError(f"Endpoint failure after {e.attempts} attempt(s): {e}",
                               ExitCode.ENDPOINT_FAILURE)
        except PromptError as e:
            raise CommandError(str(e), ExitCode.USAGE_ERROR)
    print(f"Detailed prompt: {result.detailed_prompt_path}")
    print(f"Seeded prompt:   {result.follow_up_path}")
    return ExitCode.OK


COMMANDS = {
    "check": cmd_check,
    "summarize": cmd_summarize,
    "generate-baseline": cmd_generate_baseline,
    "prompt": cmd_prompt,
    "run": cmd_run,
    "histogram": cmd_histogram,
    "self-prompt": cmd_self_prompt,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage; 2 is reserved for failed criteria
        return ExitCode.OK if e.code in (0, None) else ExitCode.USAGE_ERROR

    try:
        settings = _settings(args)
    except (ValidationError, FileNotFoundError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return ExitCode.USAGE_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level.upper(),
        format=LOG_FORMAT,
        stream=sys.stderr,
    )

    try:
        return int(COMMANDS[args.command](args, settings))
    except CommandError as e:
        print(f"Error: {e}", file=sys.stderr)
        return int(e.code)
    except ValidationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return ExitCode.USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
