"""Scripted scenario harness with live facilitator injection.

A scenario declares the simulated displays and content it uses up front, then
a list of steps. Each step has a trigger (a virtual time, an outbound-message
pattern, or a manual facilitator cue) and a list of actions delivered to the
hub as ordinary protocol messages. Runs are fully deterministic under the
virtual clock, which makes the recorded event log a golden file: same
scenario, same config, same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .config import EngineConfig
from .hub import Hub
from .model import CONTENT_KINDS, DisplayRole, parse_track
from .protocol import Outbound, encode, envelope


class ScenarioError(ValueError):
    pass


#: Virtual-time granularity used when waiting for an event trigger.
EVENT_POLL_TICK_MS = 100
DEFAULT_EVENT_TIMEOUT_MS = 5_000


@dataclass(frozen=True)
class Step:
    trigger: dict[str, Any]  # {"at_ms": int} | {"on": pattern} | {"manual": name}
    actions: tuple[dict[str, Any], ...]


@dataclass(frozen=True)
class Scenario:
    name: str
    displays: tuple[dict[str, Any], ...]
    contents: dict[str, dict[str, Any]]
    steps: tuple[Step, ...]
    track_path: str | None = None
    event_timeout_ms: int = DEFAULT_EVENT_TIMEOUT_MS
    base_dir: Path | None = None


def _check_action(action: dict[str, Any], scenario_contents: dict, display_ids: set[str]) -> None:
    keys = set(action)
    if keys == {"show"}:
        show = action["show"]
        content_ref = show.get("content")
        if content_ref not in scenario_contents:
            raise ScenarioError(f"show references undeclared content {content_ref!r}")
        try:
            DisplayRole(show.get("target"))
        except ValueError:
            raise ScenarioError(f"show targets unknown role {show.get('target')!r}") from None
    elif keys == {"inject"}:
        inject = action["inject"]
        kind = inject.get("kind")
        if kind not in ("input", "feed", "environment", "presence", "message"):
            raise ScenarioError(f"unknown injection kind {kind!r}")
        if kind == "input" and inject.get("display_id") not in display_ids:
            raise ScenarioError(
                f"input injection targets undeclared display {inject.get('display_id')!r}"
            )
    else:
        raise ScenarioError(f"unknown action {sorted(keys)!r}")


def load_scenario(document: str | bytes, base_dir: Path | None = None) -> Scenario:
    """Parse and validate a scenario document."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ScenarioError("scenario root must be an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError("scenario needs a name")
    preamble = raw.get("preamble", {})
    displays = preamble.get("displays", [])
    if not isinstance(displays, list):
        raise ScenarioError("preamble displays must be a list")
    display_ids = set()
    for display in displays:
        display_id = display.get("display_id")
        if not display_id:
            raise ScenarioError("every preamble display needs a display_id")
        try:
            DisplayRole(display.get("role"))
        except ValueError:
            raise ScenarioError(f"display {display_id!r} has unknown role") from None
        display_ids.add(display_id)
    contents = preamble.get("contents", {})
    for content_id, content in contents.items():
        if content.get("kind") not in CONTENT_KINDS:
            raise ScenarioError(f"content {content_id!r} has unknown kind {content.get('kind')!r}")

    steps: list[Step] = []
    last_at = -1
    for idx, raw_step in enumerate(raw.get("steps", [])):
        trigger = raw_step.get("trigger")
        if not isinstance(trigger, dict) or len(trigger) != 1:
            raise ScenarioError(f"step {idx}: trigger must be one of at_ms/on/manual")
        key = next(iter(trigger))
        if key == "at_ms":
            at = trigger["at_ms"]
            if not isinstance(at, int) or at < 0:
                raise ScenarioError(f"step {idx}: at_ms must be a non-negative integer")
            if at < last_at:
                raise ScenarioError(f"step {idx}: at-time triggers must be nondecreasing")
            last_at = at
        elif key == "on":
            if not isinstance(trigger["on"], dict):
                raise ScenarioError(f"step {idx}: event pattern must be an object")
        elif key == "manual":
            if not isinstance(trigger["manual"], str):
                raise ScenarioError(f"step {idx}: manual trigger needs a cue name")
        else:
            raise ScenarioError(f"step {idx}: unknown trigger {key!r}")
        actions = raw_step.get("actions", [])
        if not isinstance(actions, list):
            raise ScenarioError(f"step {idx}: actions must be a list")
        for action in actions:
            _check_action(action, contents, display_ids)
        steps.append(Step(trigger=trigger, actions=tuple(actions)))

    return Scenario(
        name=name,
        displays=tuple(displays),
        contents=contents,
        steps=tuple(steps),
        track_path=preamble.get("track"),
        event_timeout_ms=int(raw.get("event_timeout_ms", DEFAULT_EVENT_TIMEOUT_MS)),
        base_dir=base_dir,
    )


def load_scenario_file(path: str | Path) -> Scenario:
    path = Path(path)
    return load_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)


class EventLog:
    """Newline-delimited JSON record of every message that crossed the hub."""

    def __init__(self) -> None:
        self.entries: list[dict[str, Any]] = []

    def record_in(self, t_ms: int, message: dict[str, Any]) -> None:
        self.entries.append({"t": t_ms, "dir": "in", "msg": message})

    def record_out(self, t_ms: int, out: Outbound) -> None:
        self.entries.append({"t": t_ms, "dir": "out", "to": out.to, "msg": out.message})

    def to_text(self) -> str:
        return "".join(encode(entry) + "\n" for entry in self.entries)

    def matches(self, pattern: dict[str, Any], start: int = 0) -> int | None:
        """Index of the first outbound entry at/after ``start`` matching the
        pattern ({"type": ..., "payload": {subset}})."""
        for idx in range(start, len(self.entries)):
            entry = self.entries[idx]
            if entry["dir"] != "out":
                continue
            msg = entry["msg"]
            if "type" in pattern and msg.get("type") != pattern["type"]:
                continue
            subset = pattern.get("payload")
            if subset is not None and not _is_subset(subset, msg.get("payload", {})):
                continue
            return idx
        return None


def _is_subset(pattern: Any, value: Any) -> bool:
    if isinstance(pattern, dict):
        return isinstance(value, dict) and all(
            k in value and _is_subset(v, value[k]) for k, v in pattern.items()
        )
    if isinstance(pattern, list):
        return isinstance(value, list) and all(
            any(_is_subset(p, v) for v in value) for p in pattern
        )
    return pattern == value


class ScenarioRunner:
    """Drives a hub session through a scenario under a virtual clock."""

    def __init__(self, scenario: Scenario, config: EngineConfig | None = None):
        self.scenario = scenario
        track = None
        if scenario.track_path:
            track_file = Path(scenario.track_path)
            if not track_file.is_absolute() and scenario.base_dir is not None:
                track_file = scenario.base_dir / track_file
            track = parse_track(track_file.read_text(encoding="utf-8"))
        self.hub = Hub(config=config, track=track)
        self.log = EventLog()
        self._in_seq = 0
        self._event_cursor = 0

    def send(self, mtype: str, payload: dict[str, Any]) -> list[Outbound]:
        """Inject one message exactly as a device would send it, recording
        both it and everything it causes."""
        self._in_seq += 1
        message = envelope(mtype, self._in_seq, payload)
        self.log.record_in(self.hub.now_ms, message)
        out = self.hub.handle_message(message)
        for outbound in out:
            self.log.record_out(self.hub.now_ms, outbound)
        return out

    def advance_to(self, t_ms: int) -> None:
        if t_ms > self.hub.now_ms:
            self.send("clock-sync", {"now_ms": t_ms})

    def _run_action(self, action: dict[str, Any]) -> None:
        if "show" in action:
            show = action["show"]
            content = self.scenario.contents[show["content"]]
            self.send(
                "wizard-inject",
                {
                    "kind": "show",
                    "content": {"kind": content["kind"], "payload": content.get("payload", {})},
                    "target": show["target"],
                },
            )
            return
        inject = action["inject"]
        kind = inject["kind"]
        if kind == "input":
            payload = {k: v for k, v in inject.items() if k not in ("kind", "input_kind")}
            payload["kind"] = inject.get("input_kind", "touch")
            self.send("input-event", payload)
        elif kind == "feed":
            self.send("wizard-inject", {"kind": "feed-event", "event": inject.get("event", {})})
        elif kind == "environment":
            self.send(
                "wizard-inject",
                {
                    "kind": "environment",
                    "actuator": inject.get("actuator"),
                    "value": inject.get("value"),
                },
            )
        elif kind == "presence":
            self.send(
                "wizard-inject",
                {
                    "kind": "presence",
                    "user": inject.get("user"),
                    "present": inject.get("present", True),
                },
            )
        elif kind == "message":
            self.send("wizard-inject", {"kind": "message", "message": inject.get("message", {})})

    def _await_pattern(self, pattern: dict[str, Any]) -> bool:
        """Advance the clock in fixed ticks until the pattern appears in the
        outbound log (bounded by the scenario's event timeout)."""
        deadline = self.hub.now_ms + self.scenario.event_timeout_ms
        while True:
            match = self.log.matches(pattern, start=self._event_cursor)
            if match is not None:
                self._event_cursor = match + 1
                return True
            if self.hub.now_ms >= deadline:
                return False
            self.advance_to(self.hub.now_ms + EVENT_POLL_TICK_MS)

    def run(self) -> EventLog:
        """Execute every step; returns the complete event log."""
        for display in self.scenario.displays:
            payload = {
                "display_id": display["display_id"],
                "role": display["role"],
                "capabilities": display.get("capabilities", []),
            }
            if display.get("user"):
                payload["user"] = display["user"]
            self.send("register", payload)
        for step in self.scenario.steps:
            trigger = step.trigger
            if "at_ms" in trigger:
                self.advance_to(trigger["at_ms"])
            elif "on" in trigger:
                if not self._await_pattern(trigger["on"]):
                    self.log.entries.append(
                        {
                            "t": self.hub.now_ms,
                            "dir": "note",
                            "msg": {"unfired-step": trigger},
                        }
                    )
                    continue
            # manual triggers fire when reached: replay re-enacts the
            # facilitator pressing the cue in order.
            for action in step.actions:
                self._run_action(action)
        return self.log


def run_scenario(scenario: Scenario, config: EngineConfig | None = None) -> EventLog:
    return ScenarioRunner(scenario, config=config).run()


def inject(runner: ScenarioRunner, event: dict[str, Any]) -> list[Outbound]:
    """Live facilitator injection: the event enters the hub queue exactly as a
    device-originated message would."""
    mtype = event.get("type")
    payload = event.get("payload", {})
    if not isinstance(mtype, str):
        raise ScenarioError("injected event needs a type")
    return runner.send(mtype, payload)
