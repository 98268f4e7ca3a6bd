"""Headless simulated display clients.

A SimDisplay registers over the same wire protocol as a real display, records
every snapshot/diff it receives (with virtual timestamps), and maintains the
reconstructed render state by applying diffs onto the last snapshot. The
browser UI must be substitutable for one of these message-for-message.

Two transports: ``LocalHubHarness`` runs a hub in-process (messages still
round-trip through canonical JSON bytes, so there is no privileged channel),
and ``connect_ws`` speaks to a served hub over WebSocket.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from .config import EngineConfig
from .hub import Hub
from .model import AmbientTrack
from .protocol import TO_ALL, TO_SENDER, decode, encode, envelope


class ConnectError(RuntimeError):
    """Registration rejected or hub unreachable."""


@dataclass
class SimDisplay:
    display_id: str
    role: str
    received: list[tuple[int, dict[str, Any]]] = field(default_factory=list)
    state: dict[str, Any] | None = None

    def deliver(self, t_ms: int, message: dict[str, Any]) -> None:
        """Record one hub message and fold snapshots/diffs into the state."""
        self.received.append((t_ms, message))
        if message.get("type") == "snapshot":
            self.state = message["payload"]["state"]
        elif message.get("type") == "diff":
            if self.state is None:
                raise AssertionError("diff received before any snapshot")
            self.state = {**self.state, **message["payload"]["changes"]}

    def snapshots_and_diffs(self) -> list[dict[str, Any]]:
        return [m for _t, m in self.received if m.get("type") in ("snapshot", "diff")]

    def trace(self) -> str:
        return "\n".join(f"[{t}] {encode(m)}" for t, m in self.received)


class LocalHubHarness:
    """In-process hub plus connected sim displays under a virtual clock.

    Every message crosses a real encode/decode boundary, so the harness sees
    exactly the bytes a networked display would.
    """

    def __init__(self, config: EngineConfig | None = None, track: AmbientTrack | None = None):
        self.hub = Hub(config=config, track=track)
        self.displays: dict[str, SimDisplay] = {}
        self._in_seq = 0

    @property
    def now_ms(self) -> int:
        return self.hub.now_ms

    def send(self, mtype: str, payload: dict[str, Any], sender: str | None = None) -> list[dict[str, Any]]:
        """Send one message to the hub; returns the sender-directed replies.

        Snapshot/diff/broadcast traffic is routed to the recorded displays.
        """
        self._in_seq += 1
        frame = encode(envelope(mtype, self._in_seq, payload))
        out = self.hub.handle_message(decode(frame))
        replies: list[dict[str, Any]] = []
        for outbound in out:
            message = decode(encode(outbound.message))
            if outbound.to == TO_SENDER:
                replies.append(message)
                if sender is not None and sender in self.displays:
                    self.displays[sender].deliver(self.hub.now_ms, message)
            elif outbound.to == TO_ALL:
                for display in self.displays.values():
                    display.deliver(self.hub.now_ms, message)
            elif outbound.to in self.displays:
                self.displays[outbound.to].deliver(self.hub.now_ms, message)
        return replies

    def connect(self, registration: dict[str, Any]) -> SimDisplay:
        """Register a new sim display; raises ConnectError on rejection."""
        display_id = registration.get("display_id", "")
        display = SimDisplay(display_id=display_id, role=registration.get("role", ""))
        self.displays[display_id] = display
        replies = self.send("register", registration, sender=display_id)
        errors = [m for m in replies if m.get("type") == "error"]
        if errors:
            del self.displays[display_id]
            raise ConnectError(errors[0]["payload"]["reason"])
        return display

    def advance(self, dt_ms: int) -> None:
        self.send("clock-sync", {"now_ms": self.hub.now_ms + dt_ms})

    def assert_eventually(
        self,
        display: SimDisplay,
        predicate: Callable[[dict[str, Any]], bool],
        timeout_ms: int,
        tick_ms: int = 100,
    ) -> None:
        """Poll the display's reconstructed state under the virtual clock.

        Raises AssertionError with the full received trace when the predicate
        never holds within the timeout.
        """
        deadline = self.hub.now_ms + timeout_ms
        while True:
            if display.state is not None and predicate(display.state):
                return
            if self.hub.now_ms >= deadline:
                raise AssertionError(
                    f"predicate never true within {timeout_ms} virtual ms; trace:\n"
                    + display.trace()
                )
            self.advance(min(tick_ms, deadline - self.hub.now_ms))


async def connect_ws(url: str, registration: dict[str, Any]) -> tuple[Any, SimDisplay]:
    """Connect to a served hub over WebSocket and register.

    Returns the open connection and the display (initial snapshot already
    recorded). The caller owns the connection lifecycle.
    """
    import websockets

    try:
        conn = await websockets.connect(url)
    except OSError as exc:
        raise ConnectError(f"connection refused: {exc}") from None
    display = SimDisplay(
        display_id=registration.get("display_id", ""), role=registration.get("role", "")
    )
    await conn.send(encode(envelope("register", 1, registration)))
    while True:
        message = json.loads(await conn.recv())
        if message.get("type") == "error":
            await conn.close()
            raise ConnectError(message["payload"]["reason"])
        display.deliver(0, message)
        if message.get("type") == "snapshot":
            return conn, display
