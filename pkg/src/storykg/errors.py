"""Exception types shared across the pipeline.

The service layer maps these onto HTTP status codes and the CLI maps them
onto exit codes, so raising the right class matters more than the message.
"""

from __future__ import annotations


class StorykgError(Exception):
    """Base class for all pipeline errors."""


class ValidationError(StorykgError):
    """Bad argument or input value (caller error)."""


class ConfigError(StorykgError):
    """Broken or missing configuration, including bundled data files."""


class MalformedRowError(ValidationError):
    """A transcript row failed to parse; message names row and column."""


class NotFoundError(StorykgError):
    """A referenced object (entity, template, ...) does not exist."""


class ArtifactMissingError(StorykgError):
    """A pipeline step needs an artifact a previous step has not produced."""


class TemplateError(StorykgError):
    """Prompt template missing or a placeholder left unbound."""


class CassetteMissError(StorykgError):
    """Replay-mode request whose fingerprint is not in the cassette."""

    def __init__(self, fingerprint: str, template_id: str = "") -> None:
        self.fingerprint = fingerprint
        self.template_id = template_id
        detail = f" for template '{template_id}'" if template_id else ""
        super().__init__(
            f"cassette miss{detail}: no recorded response for fingerprint {fingerprint}"
        )


class TransportError(StorykgError):
    """Provider call failed after the configured retries."""


class StructuredOutputError(StorykgError):
    """A model response could not be parsed into the expected structure."""

    def __init__(self, message: str, raw: str = "") -> None:
        self.raw = raw
        super().__init__(message)
