"""
Prompt Catalog

The four generation prompts and the two self-prompting messages ship as text
files under `usage_synth/templates/prompts/`. Their content is used byte for
byte; nothing is reformatted.

    P1  non-detailed, no seed    setup + instruction (two user messages)
    P2  non-detailed, seed       setup + instruction, seed CSV appended to the setup
    P3  detailed, no seed        one user message
    P4  detailed, seed           one user message, seed CSV appended

Usage:
    spec = build_prompt(PromptLabel.P4, seed_csv=Path("seed.csv").read_text())
    Path("p4.txt").write_text(render_prompt(spec))
"""

from importlib import resources
from pathlib import Path

from usage_synth.core.exceptions import PromptError
from usage_synth.models.generation import PROMPT_TRAITS, ChatMessage, PromptSpec
from usage_synth.models.usage import PromptLabel

TEMPLATE_DIR = "templates/prompts"

PROMPT_TEMPLATES: dict[PromptLabel, tuple[str, ...]] = {
    PromptLabel.P1: ("p1_setup.txt", "p1_instruction.txt"),
    PromptLabel.P2: ("p2_setup.txt", "p2_instruction.txt"),
    PromptLabel.P3: ("p3.txt",),
    PromptLabel.P4: ("p4.txt",),
}

META_PROMPT = "meta_prompt.txt"
META_FOLLOW_UP = "meta_follow_up.txt"

# Seed rows follow the prompt text after one blank line.
SEED_SEPARATOR = "\n\n"


def load_template(name: str) -> str:
    return resources.files("usage_synth").joinpath(f"{TEMPLATE_DIR}/{name}").read_text(encoding="utf-8")


def bundled_template_dir() -> Path:
    return Path(str(resources.files("usage_synth").joinpath(TEMPLATE_DIR)))


def build_prompt(label: PromptLabel | str, seed_csv: str | None = None) -> PromptSpec:
    """Resolve a prompt label to its messages. Seed data is required for P2/P4 and refused otherwise."""
    try:
        label = PromptLabel(label)
    except ValueError:
        raise PromptError(f"Unknown prompt label: {label!r}")

    detail, uses_seed = PROMPT_TRAITS[label]
    if uses_seed and not seed_csv:
        raise PromptError(f"{label.value} requires seed data")
    if not uses_seed and seed_csv:
        raise PromptError(f"{label.value} does not take seed data")

    texts = [load_template(name) for name in PROMPT_TEMPLATES[label]]
    if uses_seed:
        # the seed follows the message that refers to the attached file
        texts[0] = texts[0] + SEED_SEPARATOR + seed_csv

    return PromptSpec(
        label=label,
        detail=detail,
        uses_seed=uses_seed,
        messages=tuple(ChatMessage(role="user", content=text) for text in texts),
    )


def render_prompt(spec: PromptSpec) -> str:
    """Labeled plain-text rendering for audit or pasting into a chat product."""
    lines = [
        f"# Prompt {spec.label.value} ({spec.detail.value}, seed data: {'yes' if spec.uses_seed else 'no'})",
        "",
    ]
    for idx, message in enumerate(spec.messages, start=1):
        lines.append(f"## Message {idx} of {len(spec.messages)} ({message.role})")
        lines.append(message.content)
        lines.append("")
    return "\n".join(lines)
