"""The single chokepoint for model calls: completion, embedding, record/replay.

Nothing else in the pipeline talks to the network. Every completion is
fingerprinted by content (template id, resolved prompt, model, temperature),
so cassettes survive reordering of calls, and replay mode never falls through
to a live request.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import httpx

from .config import LlmSettings
from .errors import CassetteMissError, ConfigError, TransportError, ValidationError
from .templates import render_template

MODES = ("live", "record", "replay")


@dataclass(frozen=True)
class CompletionRequest:
    template_id: str
    variables: dict[str, str] = field(hash=False, default_factory=dict)
    model: str = "gpt-4o-mini"
    temperature: float = 0.0
    max_tokens: int = 1500

    def resolved_prompt(self) -> str:
        return render_template(self.template_id, self.variables)


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)


def completion_fingerprint(
    template_id: str, prompt: str, model: str, temperature: float
) -> str:
    payload = "\x1f".join([template_id, prompt, model, f"{temperature:.6g}"])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def embedding_fingerprint(model: str, text: str) -> str:
    payload = "\x1f".join(["embedding", model, text])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Cassette:
    """Line-delimited store of recorded responses keyed by content fingerprint."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._entries: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    self._entries[record["fingerprint"]] = record

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, fingerprint: str) -> Optional[dict]:
        return self._entries.get(fingerprint)

    def record(self, entry: dict) -> None:
        with self._lock:
            fresh = entry["fingerprint"] not in self._entries
            self._entries[entry["fingerprint"]] = entry
            if fresh:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")


@dataclass(frozen=True)
class TransportRequest:
    """What a transport callable receives; HTTP transports use prompt/model only."""

    kind: str  # "completion" | "embedding"
    template_id: str
    prompt: str
    model: str
    temperature: float
    max_tokens: int
    variables: dict[str, str] = field(hash=False, default_factory=dict)


Transport = Callable[[TransportRequest], object]


def http_transport(settings: LlmSettings) -> Transport:
    """OpenAI-compatible chat/embeddings transport; key read from the environment."""

    def call(request: TransportRequest) -> object:
        api_key = os.environ.get(settings.api_key_env, "")
        if not api_key:
            raise ConfigError(
                f"no API key: set the {settings.api_key_env} environment variable"
            )
        headers = {"Authorization": f"Bearer {api_key}"}
        try:
            if request.kind == "embedding":
                resp = httpx.post(
                    f"{settings.api_base.rstrip('/')}/embeddings",
                    headers=headers,
                    json={"model": request.model, "input": request.prompt},
                    timeout=60.0,
                )
                resp.raise_for_status()
                return resp.json()["data"][0]["embedding"]
            resp = httpx.post(
                f"{settings.api_base.rstrip('/')}/chat/completions",
                headers=headers,
                json={
                    "model": request.model,
                    "temperature": request.temperature,
                    "max_tokens": request.max_tokens,
                    "messages": [{"role": "user", "content": request.prompt}],
                },
                timeout=120.0,
            )
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise TransportError(f"provider call failed: {exc}") from exc

    return call


def hash_embedding(text: str, dimension: int) -> EmbeddingVector:
    """Deterministic signed feature-hashing embedding.

    Stable across runs and platforms; texts sharing vocabulary share vector
    components, so cosine similarity tracks lexical overlap.
    """
    if not text.strip():
        raise ValidationError("cannot embed empty text")
    values = [0.0] * dimension
    for token in text.lower().split():
        token = token.strip(".,;:!?\"'()[]")
        if not token:
            continue
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        index = int.from_bytes(digest[:4], "big") % dimension
        sign = 1.0 if digest[4] & 1 else -1.0
        values[index] += sign
    norm = math.sqrt(sum(v * v for v in values))
    if norm > 0:
        values = [v / norm for v in values]
    return EmbeddingVector(values=tuple(values))


class LlmGateway:
    """Completion/embedding front door with record/replay and bounded fan-out."""

    def __init__(
        self,
        settings: LlmSettings,
        mode: str = "replay",
        cassette_path: str | Path | None = None,
        transport: Transport | None = None,
    ) -> None:
        if mode not in MODES:
            raise ValidationError(f"unknown gateway mode {mode!r}; expected one of {MODES}")
        if mode in ("record", "replay") and cassette_path is None:
            raise ConfigError(f"gateway mode {mode!r} requires a cassette path")
        self.settings = settings
        self.mode = mode
        self.cassette = Cassette(cassette_path) if cassette_path is not None else None
        self._transport = transport if transport is not None else http_transport(settings)
        self._slots = threading.BoundedSemaphore(max(settings.parallelism, 1))

    # -- completions ---------------------------------------------------------

    def complete(
        self,
        template_id: str,
        variables: dict[str, str],
        *,
        temperature: float | None = None,
        max_tokens: int | None = None,
    ) -> str:
        request = CompletionRequest(
            template_id=template_id,
            variables=dict(variables),
            model=self.settings.chat_model,
            temperature=self.settings.temperature if temperature is None else temperature,
            max_tokens=self.settings.max_tokens if max_tokens is None else max_tokens,
        )
        prompt = request.resolved_prompt()
        fingerprint = completion_fingerprint(
            request.template_id, prompt, request.model, request.temperature
        )
        if self.mode == "replay":
            entry = self.cassette.lookup(fingerprint)
            if entry is None:
                raise CassetteMissError(fingerprint, template_id)
            return entry["response"]
        response = self._call_with_retries(
            TransportRequest(
                kind="completion",
                template_id=request.template_id,
                prompt=prompt,
                model=request.model,
                temperature=request.temperature,
                max_tokens=request.max_tokens,
                variables=request.variables,
            )
        )
        if not isinstance(response, str):
            raise TransportError(
                f"completion transport returned {type(response).__name__}, expected str"
            )
        if self.mode == "record":
            self.cassette.record(
                {
                    "kind": "completion",
                    "fingerprint": fingerprint,
                    "template_id": request.template_id,
                    "model": request.model,
                    "temperature": request.temperature,
                    "prompt": prompt,
                    "response": response,
                }
            )
        return response

    def fingerprint_for(
        self, template_id: str, variables: dict[str, str], temperature: float | None = None
    ) -> str:
        prompt = render_template(template_id, variables)
        temp = self.settings.temperature if temperature is None else temperature
        return completion_fingerprint(template_id, prompt, self.settings.chat_model, temp)

    # -- embeddings ------------------------------------------------------------

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise ValidationError("cannot embed empty text")
        if self.settings.embedding_backend == "hash":
            return hash_embedding(text, self.settings.embedding_dimension)
        fingerprint = embedding_fingerprint(self.settings.embedding_model, text)
        if self.mode == "replay":
            entry = self.cassette.lookup(fingerprint)
            if entry is None:
                raise CassetteMissError(fingerprint, "embedding")
            return EmbeddingVector(values=tuple(entry["values"]))
        values = self._call_with_retries(
            TransportRequest(
                kind="embedding",
                template_id="embedding",
                prompt=text,
                model=self.settings.embedding_model,
                temperature=0.0,
                max_tokens=0,
            )
        )
        vector = EmbeddingVector(values=tuple(float(v) for v in values))
        if self.mode == "record":
            self.cassette.record(
                {
                    "kind": "embedding",
                    "fingerprint": fingerprint,
                    "model": self.settings.embedding_model,
                    "text": text,
                    "values": list(vector.values),
                }
            )
        return vector

    # -- plumbing ----------------------------------------------------------------

    def _call_with_retries(self, request: TransportRequest) -> object:
        attempts = max(self.settings.retries, 1)
        last: Exception | None = None
        for attempt in range(attempts):
            try:
                with self._slots:
                    return self._transport(request)
            except TransportError as exc:
                last = exc
                if attempt + 1 < attempts:
                    time.sleep(self.settings.retry_backoff * (attempt + 1))
        raise TransportError(
            f"provider call failed after {attempts} attempts: {last}"
        ) from last

    def audit(self) -> "GatewayAudit":
        return GatewayAudit(self)


class GatewayAudit:
    """Gateway view that records the fingerprints of the calls made through it."""

    def __init__(self, gateway: LlmGateway) -> None:
        self._gateway = gateway
        self.fingerprints: list[str] = []

    @property
    def settings(self) -> LlmSettings:
        return self._gateway.settings

    @property
    def mode(self) -> str:
        return self._gateway.mode

    def complete(self, template_id: str, variables: dict[str, str], **kwargs) -> str:
        self.fingerprints.append(
            self._gateway.fingerprint_for(
                template_id, variables, kwargs.get("temperature")
            )
        )
        return self._gateway.complete(template_id, variables, **kwargs)

    def embed(self, text: str) -> EmbeddingVector:
        return self._gateway.embed(text)

    def audit(self) -> "GatewayAudit":
        return GatewayAudit(self._gateway)
