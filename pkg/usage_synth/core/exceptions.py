"""Exception hierarchy shared by the parser, evaluators, generators and the LLM client."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from usage_synth.models.usage import StructuralFinding


class UsageSynthError(Exception):
    """Base exception for usage-synth errors."""


class UsageParseError(UsageSynthError):
    """A CSV could not produce a dataset at all (missing column, empty, mostly unparseable)."""

    def __init__(
        self,
        message: str,
        fatal: list[StructuralFinding],
        findings: list[StructuralFinding] | None = None,
    ):
        self.fatal = fatal
        self.findings = findings or list(fatal)
        super().__init__(message)


class SessionizeError(UsageSynthError):
    """Raised when logs without a time-of-day are grouped into sessions or gaps."""


class MetricNotAssessable(UsageSynthError):
    """A realism metric cannot be computed for this dataset."""


class SeedProfileError(UsageSynthError):
    """The seed dataset cannot back a statistical profile."""


class GenerationError(UsageSynthError):
    """The baseline generator cannot draw a day from the given profile and config."""


class PromptError(UsageSynthError):
    """Invalid prompt request (unknown label, seed data mismatch)."""


class CsvExtractionError(UsageSynthError):
    """No header-like CSV block was found in a model reply."""


class LLMClientError(UsageSynthError):
    """Raised when the chat-completion endpoint fails or cannot be reached."""

    def __init__(
        self,
        message: str,
        status_code: int | None = None,
        detail: str | None = None,
        attempts: int = 0,
    ):
        self.status_code = status_code
        self.detail = detail
        self.attempts = attempts
        super().__init__(message)
