"""
Generation Pipeline

    extract_csv     pull the CSV block out of a model reply
    run_generation  one attempt: fresh conversation, one completion, artifacts on disk
    self_prompt     ask the model to write the detailed prompts (meta-prompt + follow-up)

Run directory layout (one per attempt):

    <out>/<label>_attempt<n>/raw_reply.txt   reply text, written before any parsing
    <out>/<label>_attempt<n>/dataset.csv     extracted CSV block (when found)
    <out>/<label>_attempt<n>/run.json        GenerationRun metadata
"""

import csv
import logging
from datetime import datetime
from pathlib import Path

from usage_synth.core.exceptions import CsvExtractionError, LLMClientError, PromptError
from usage_synth.models.generation import ChatMessage, GenerationRun, PromptSpec, SelfPromptResult
from usage_synth.services.llm_client import ChatCompletionClient
from usage_synth.services.prompt_catalog import (
    META_FOLLOW_UP,
    META_PROMPT,
    bundled_template_dir,
    load_template,
)
from usage_synth.services.report_writer import write_text_atomic
from usage_synth.services.usage_csv import CANONICAL_HEADER, match_header

logger = logging.getLogger(__name__)

RAW_REPLY_FILE = "raw_reply.txt"
DATASET_FILE = "dataset.csv"
RUN_FILE = "run.json"


# --- CSV extraction ---

def _is_header(line: str) -> bool:
    fields = next(csv.reader([line]), [])
    return match_header(fields) is not None


def _is_fence(line: str) -> bool:
    return line.lstrip().startswith("```")


def extract_csv(raw_reply: str) -> str:
    """
    Return the longest contiguous block that starts with a recognised header
    line. A block ends at a blank line, a code fence or a line without a
    comma. Equal lengths resolve to the first block.
    """
    lines = [line.rstrip() for line in raw_reply.splitlines()]
    blocks: list[list[str]] = []
    current: list[str] | None = None

    for line in lines:
        if current is not None:
            if line.strip() and not _is_fence(line) and "," in line and not _is_header(line):
                current.append(line)
                continue
            blocks.append(current)
            current = None
        if not _is_fence(line) and _is_header(line):
            current = [line]
    if current is not None:
        blocks.append(current)

    if not blocks:
        raise CsvExtractionError("no CSV header line found in reply")
    if len(blocks) > 1:
        logger.warning(
            f"Reply contains {len(blocks)} CSV blocks ({[len(b) for b in blocks]} lines); "
            f"using the longest"
        )
    best = max(blocks, key=len)
    return "\n".join(best) + "\n"


# --- Generation runs ---

def run_dir_for(out_dir: Path, prompt: PromptSpec, attempt: int) -> Path:
    return Path(out_dir) / f"{prompt.label.value}_attempt{attempt}"


def run_generation(
    prompt: PromptSpec,
    client: ChatCompletionClient,
    attempt: int,
    out_dir: Path,
) -> GenerationRun:
    """
    Request one completion for `prompt` in a fresh conversation and store the
    artifacts. Raises LLMClientError after writing run.json with the error.
    """
    run_dir = run_dir_for(out_dir, prompt, attempt)
    run_dir.mkdir(parents=True, exist_ok=True)
    run = GenerationRun(
        prompt=prompt,
        attempt=attempt,
        endpoint=client.completions_url,
        model_name=client.model,
        started_at=datetime.now(),
        run_dir=str(run_dir),
    )
    logger.info(f"Running {prompt.label.value} attempt {attempt} against {client.completions_url}")

    try:
        reply = client.complete(prompt.messages)
    except LLMClientError as e:
        failed = run.model_copy(update={"error": str(e), "finished_at": datetime.now()})
        write_text_atomic(run_dir / RUN_FILE, failed.model_dump_json(indent=2))
        raise

    write_text_atomic(run_dir / RAW_REPLY_FILE, reply)

    update: dict = {"reply_count": 1, "raw_replies": [reply]}
    try:
        extracted = extract_csv(reply)
        write_text_atomic(run_dir / DATASET_FILE, extracted)
        update["extracted_csv"] = extracted
    except CsvExtractionError as e:
        logger.warning(f"{prompt.label.value} attempt {attempt}: {e}")
        update["extraction_error"] = str(e)
    update["finished_at"] = datetime.now()

    run = GenerationRun.model_validate({**run.model_dump(), **update})
    write_text_atomic(run_dir / RUN_FILE, run.model_dump_json(indent=2))
    return run


# --- Self-prompting ---

def _next_free(path: Path) -> Path:
    if not path.exists():
        return path
    n = 2
    while (candidate := path.with_name(f"{path.stem}_{n}{path.suffix}")).exists():
        n += 1
    return candidate


def self_prompt(client: ChatCompletionClient, out_dir: Path) -> SelfPromptResult:
    """
    Ask for a detailed generation prompt, then for its seeded variant in the
    same conversation. Both replies are saved as new files in `out_dir`.
    """
    out_dir = Path(out_dir)
    if out_dir.resolve() == bundled_template_dir().resolve():
        raise PromptError("self-prompt output must not go into the bundled template directory")

    conversation = [ChatMessage(role="user", content=load_template(META_PROMPT))]
    detailed = client.complete(conversation)
    conversation += [
        ChatMessage(role="assistant", content=detailed),
        ChatMessage(role="user", content=load_template(META_FOLLOW_UP)),
    ]
    follow_up = client.complete(conversation)
    conversation.append(ChatMessage(role="assistant", content=follow_up))

    for name, text in (("detailed prompt", detailed), ("seeded prompt", follow_up)):
        missing = [column for column in CANONICAL_HEADER if column not in text]
        if not text.strip() or missing:
            logger.warning(f"Self-prompt {name} looks malformed (missing {missing}); stored raw")

    detailed_path = write_text_atomic(_next_free(out_dir / "self_prompt_detailed.txt"), detailed)
    follow_up_path = write_text_atomic(_next_free(out_dir / "self_prompt_seeded.txt"), follow_up)
    logger.info(f"Self-prompt texts written to {detailed_path} and {follow_up_path}")

    return SelfPromptResult(
        detailed_prompt_text=detailed,
        follow_up_text=follow_up,
        conversation=conversation,
        detailed_prompt_path=str(detailed_path),
        follow_up_path=str(follow_up_path),
    )
