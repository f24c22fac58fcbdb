"""Pipeline configuration: bundled defaults, user file, flag overrides.

Precedence is flags > user config file > bundled defaults. The bundled
defaults (including the editable word lists) live in data/default_config.yaml.
"""

from __future__ import annotations

import copy
import hashlib
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, Field, field_validator

from .errors import ConfigError


class PreprocessSettings(BaseModel):
    speaker_pronoun_rewrite: bool = True
    clitic_removals: dict[str, str] = Field(default_factory=dict)
    negative_expansions: dict[str, str] = Field(default_factory=dict)
    proper_nouns: list[str] = Field(default_factory=list)
    filler_removal: bool = False
    fillers: list[str] = Field(default_factory=list)
    opening_patterns: list[str] = Field(default_factory=list)

    @field_validator("proper_nouns")
    @classmethod
    def _proper_nouns_multiword(cls, names: list[str]) -> list[str]:
        for name in names:
            if " " not in name.strip():
                raise ValueError(
                    f"proper noun entry {name!r} has no internal space; "
                    "single-word names need no joining"
                )
        return names


class IngestSettings(BaseModel):
    columns: dict[str, str] = Field(
        default_factory=lambda: {
            f: f
            for f in (
                "sequence",
                "episode",
                "episode_title",
                "start_time",
                "end_time",
                "text",
                "speaker",
            )
        }
    )
    chunk_size: int = 600


class LlmSettings(BaseModel):
    chat_model: str = "gpt-4o-mini"
    embedding_model: str = "text-embedding-3-small"
    temperature: float = 0.0
    max_tokens: int = 1500
    api_base: str = "https://api.openai.com/v1"
    api_key_env: str = "STORYKG_API_KEY"
    retries: int = 3
    retry_backoff: float = 0.5
    parallelism: int = 4
    embedding_backend: str = "hash"
    embedding_dimension: int = 512


class BuildSettings(BaseModel):
    max_gleanings: int = 2
    resolution_schedule: list[float] = Field(default_factory=lambda: [1.0, 0.5])
    max_levels: int = 2
    prune_min_mentions: int = 2


class RetrievalSettings(BaseModel):
    top_k_entities: int = 5
    top_k_chunks: int = 3
    context_budget: int = 8000
    global_level: Optional[int] = None


class AnalyticsSettings(BaseModel):
    rolling_window: int = 10
    pelt_penalty: Optional[float] = None
    lexicon_path: Optional[str] = None
    sentiment_alpha: float = 15.0


class PipelineConfig(BaseModel):
    seed: int = 42
    preprocess: PreprocessSettings = Field(default_factory=PreprocessSettings)
    ingest: IngestSettings = Field(default_factory=IngestSettings)
    llm: LlmSettings = Field(default_factory=LlmSettings)
    build: BuildSettings = Field(default_factory=BuildSettings)
    retrieval: RetrievalSettings = Field(default_factory=RetrievalSettings)
    analytics: AnalyticsSettings = Field(default_factory=AnalyticsSettings)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(), sort_keys=True)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_yaml().encode("utf-8")).hexdigest()


def _bundled_defaults() -> dict[str, Any]:
    raw = resources.files("storykg.data").joinpath("default_config.yaml").read_text("utf-8")
    return yaml.safe_load(raw)


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _set_dotted(data: dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override {dotted!r}: {part!r} is not a section")
    node[parts[-1]] = value


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> PipelineConfig:
    """Load the effective config.

    `overrides` maps dotted keys (e.g. "ingest.chunk_size") to values and
    wins over the user file, which wins over the bundled defaults.
    """
    data = _bundled_defaults()
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            user = yaml.safe_load(p.read_text("utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"could not parse config file {p}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"config file {p} must contain a mapping at top level")
        data = _deep_merge(data, user)
    for key, value in (overrides or {}).items():
        if value is not None:
            _set_dotted(data, key, value)
    try:
        return PipelineConfig.model_validate(data)
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
