"""Shared test fixtures and the scripted transport helper."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from storykg.config import load_config
from storykg.gateway import LlmGateway, TransportRequest

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_config():
    return load_config(FIXTURES / "fixture_config.yaml")


@pytest.fixture()
def default_config():
    return load_config()


class FakeTransport:
    """Canned responses per template id; records every request it sees.

    A value may be a string, a list of strings (consumed in order), or a
    callable taking the TransportRequest.
    """

    def __init__(self, responses: dict | None = None) -> None:
        self.responses = dict(responses or {})
        self.requests: list[TransportRequest] = []

    def __call__(self, request: TransportRequest):
        self.requests.append(request)
        handler = self.responses.get(request.template_id)
        if handler is None:
            raise AssertionError(
                f"FakeTransport has no response for {request.template_id!r}"
            )
        if callable(handler):
            return handler(request)
        if isinstance(handler, list):
            return handler.pop(0)
        return handler

    def calls_for(self, template_id: str) -> int:
        return sum(1 for r in self.requests if r.template_id == template_id)


@pytest.fixture()
def fake_gateway_factory(default_config, tmp_path):
    """Build gateways wired to a FakeTransport (live mode, no cassette)."""

    def factory(responses: dict, mode: str = "live", cassette: str | None = None):
        transport = FakeTransport(responses)
        cassette_path = None
        if mode in ("record", "replay"):
            cassette_path = cassette or str(tmp_path / "cassette.jsonl")
        gateway = LlmGateway(
            default_config.llm, mode=mode, cassette_path=cassette_path, transport=transport
        )
        return gateway, transport

    return factory
