from __future__ import annotations

import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def movie_track_text() -> str:
    return (FIXTURES / "tracks" / "movie_night.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def saga_track_text() -> str:
    return (FIXTURES / "tracks" / "saga_e01.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def derby_feed_text() -> str:
    return (FIXTURES / "feeds" / "derby_finale.jsonl").read_text(encoding="utf-8")


def make_track_doc(cues: list[dict], duration_ms: int = 100_000, media_id: str = "t") -> str:
    return json.dumps({"media_id": media_id, "duration_ms": duration_ms, "cues": cues})


def make_cue_raw(
    cue_id: str,
    start_ms: int,
    end_ms: int,
    target: str = "surround-wall",
    kind: str = "stat",
    attention: str = "ambient",
    activation: str = "auto",
    priority: int = 0,
    payload: dict | None = None,
) -> dict:
    if payload is None:
        payload = {"options": ["a", "b"]} if kind == "poll" else (
            {"actuator": "light", "value": 1} if kind == "environment-action" else {}
        )
    return {
        "id": cue_id,
        "start_ms": start_ms,
        "end_ms": end_ms,
        "target": target,
        "kind": kind,
        "attention": attention,
        "activation": activation,
        "priority": priority,
        "payload": payload,
    }
