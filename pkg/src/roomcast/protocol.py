"""Wire protocol: frame-delimited UTF-8 JSON envelopes {type, seq, payload}.

One JSON object per frame (one line over byte streams, one message over
WebSockets). Encoding is canonical (sorted keys, fixed separators) so that
recorded logs are byte-identical across runs. See docs/protocol.md for the
full catalogue.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

# Inbound message types (device/display -> hub).
IN_TYPES = (
    "register",
    "transport",
    "input-event",
    "token-op",
    "poll-op",
    "cast",
    "object-detect",
    "wizard-inject",
    "clock-sync",
)

# Outbound message types (hub -> device/display).
OUT_TYPES = ("snapshot", "diff", "ack", "error", "actuator")

#: Routing sentinels used in outbound envelopes' destinations.
TO_SENDER = "@sender"
TO_ALL = "@all"


class ProtocolError(ValueError):
    """Malformed frame or envelope; the session must stay unharmed."""


@dataclass(frozen=True)
class Outbound:
    """An outbound envelope plus where it should go: a display id, the sender
    of the message being answered, or everyone."""

    to: str
    message: dict[str, Any]


def encode(message: dict[str, Any]) -> str:
    """Canonical single-line JSON encoding of one envelope."""
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def decode(frame: str | bytes) -> dict[str, Any]:
    if isinstance(frame, bytes):
        try:
            frame = frame.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError(f"frame is not UTF-8: {exc}") from None
    try:
        message = json.loads(frame)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON frame: {exc}") from None
    if not isinstance(message, dict):
        raise ProtocolError("envelope must be a JSON object")
    return message


def check_envelope(message: dict[str, Any]) -> tuple[str, dict[str, Any]]:
    """Validate {type, seq, payload}; returns (type, payload)."""
    mtype = message.get("type")
    if mtype not in IN_TYPES:
        raise ProtocolError(f"unknown message type {mtype!r}")
    if "seq" in message and not isinstance(message["seq"], int):
        raise ProtocolError("seq must be an integer")
    payload = message.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolError("payload must be an object")
    return mtype, payload


def envelope(mtype: str, seq: int, payload: dict[str, Any]) -> dict[str, Any]:
    return {"type": mtype, "seq": seq, "payload": payload}
