"""Pydantic schemas for prompts, chat messages and generation runs."""

from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from usage_synth.models.usage import PromptLabel


class Detail(str, Enum):
    NON_DETAILED = "non_detailed"
    DETAILED = "detailed"


# Prompt characteristics: (detail level, includes seed data)
PROMPT_TRAITS: dict[PromptLabel, tuple[Detail, bool]] = {
    PromptLabel.P1: (Detail.NON_DETAILED, False),
    PromptLabel.P2: (Detail.NON_DETAILED, True),
    PromptLabel.P3: (Detail.DETAILED, False),
    PromptLabel.P4: (Detail.DETAILED, True),
}


class ChatMessage(BaseModel):
    model_config = ConfigDict(frozen=True)

    role: Literal["system", "user", "assistant"]
    content: str


class PromptSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: PromptLabel
    detail: Detail
    uses_seed: bool
    messages: tuple[ChatMessage, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _matches_label(self) -> PromptSpec:
        if PROMPT_TRAITS[self.label] != (self.detail, self.uses_seed):
            raise ValueError(f"{self.label.value} must be {PROMPT_TRAITS[self.label]}")
        return self


class GenerationRun(BaseModel):
    """Metadata of one generation attempt; written as run.json next to the raw reply."""

    prompt: PromptSpec
    attempt: int = Field(gt=0)
    endpoint: str
    model_name: str
    reply_count: int = Field(0, ge=0)
    raw_replies: list[str] = []
    extracted_csv: str | None = None
    extraction_error: str | None = None
    error: str | None = None
    seed_delivery: str = "inline"
    role_split: str = "all-user"
    started_at: datetime
    finished_at: datetime | None = None
    run_dir: str | None = None

    @model_validator(mode="after")
    def _replies_counted(self) -> GenerationRun:
        if self.reply_count != len(self.raw_replies):
            raise ValueError("reply_count must equal the number of raw replies")
        return self

    @property
    def succeeded(self) -> bool:
        return self.error is None and self.reply_count >= 1


class SelfPromptResult(BaseModel):
    detailed_prompt_text: str
    follow_up_text: str
    conversation: list[ChatMessage]
    detailed_prompt_path: str | None = None
    follow_up_path: str | None = None
