"""The orchestrator: display registry, session state, and the message loop.

One Hub instance owns all mutable session state. Every state change flows
through ``handle_message``, which validates the inbound envelope, applies it,
and returns the outbound messages it caused (acks/errors to the sender,
actuator broadcasts, snapshots, and per-display render-state diffs).
Processing is synchronous and driven by a virtual clock (``clock-sync``
messages), so replaying a recorded inbound log reproduces the outbound log
byte for byte.

Displays are stateless renderers: they get a full snapshot on register and
field-level diffs afterwards; applying the diffs in order reconstructs the
composed render state exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from . import attention as attn
from . import layout as layout_mod
from .arbiter import ControlToken, SHARED_CAST, SHARED_CONTROL, TokenError
from .config import EngineConfig
from .model import (
    Activation,
    AmbientTrack,
    AttentionLevel,
    ContentDescriptor,
    Cue,
    DisplayRole,
    CONTENT_KINDS,
    ENVIRONMENT_ACTION,
)
from .plot import PlotTrack, map_frame, parse_plot
from .protocol import (
    Outbound,
    ProtocolError,
    TO_ALL,
    TO_SENDER,
    check_envelope,
    envelope,
)
from .sports import FeedError, FieldSpec, INJECTED_CUE_WINDOW_MS, SportsDesk
from .timeline import (
    CueScheduler,
    MediaClock,
    TimelineState,
    TransportError,
    apply_transport,
    render_order_key,
)

SHARED_ROLES = (DisplayRole.PRIMARY_TV, DisplayRole.SURROUND_WALL, DisplayRole.AUGMEN_TABLE)

#: Roles whose brightness is mediated; the TV always carries the main media
#: and personal devices manage themselves, so both stay pinned at focus.
MEDIATED_ROLES = (DisplayRole.SURROUND_WALL, DisplayRole.AUGMEN_TABLE)


@dataclass(frozen=True)
class DisplayRegistration:
    display_id: str
    role: DisplayRole
    capabilities: frozenset[str] = frozenset()
    user: str | None = None


@dataclass
class Poll:
    poll_id: str
    question: str
    options: tuple[str, ...]
    state: str = "open"  # open | closed
    votes: dict[str, tuple[str, str]] = field(default_factory=dict)  # user -> (option, privacy)

    def aggregates(self) -> dict[str, Any]:
        counts = {option: 0 for option in self.options}
        for option, _privacy in self.votes.values():
            counts[option] += 1
        public_votes = sorted(
            (user, option)
            for user, (option, privacy) in self.votes.items()
            if privacy == "public"
        )
        return {
            "poll_id": self.poll_id,
            "question": self.question,
            "options": list(self.options),
            "state": self.state,
            "counts": counts,
            "total": len(self.votes),
            "public_votes": [{"user": u, "option": o} for u, o in public_votes],
        }


@dataclass
class Preferences:
    """Per-user interest sets and privacy defaults, persisted as a flat file."""

    users: dict[str, dict[str, Any]] = field(default_factory=dict)
    path: Path | None = None

    @classmethod
    def load(cls, path: str | Path | None) -> "Preferences":
        if path is None:
            return cls()
        p = Path(path)
        if not p.exists():
            return cls(path=p)
        raw = json.loads(p.read_text(encoding="utf-8"))
        if raw.get("version") != 1:
            raise ValueError(f"unsupported preference store version {raw.get('version')!r}")
        return cls(users=raw.get("users", {}), path=p)

    def save(self) -> None:
        if self.path is None:
            return
        doc = {"version": 1, "users": self.users}
        self.path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    def interests(self, user: str) -> set[str]:
        return set(self.users.get(user, {}).get("interests", []))

    def privacy_default(self, user: str) -> str:
        return self.users.get(user, {}).get("privacy_default", "public")

    def set_interests(self, user: str, interests: set[str], privacy_default: str | None = None) -> None:
        entry = self.users.setdefault(user, {})
        entry["interests"] = sorted(interests)
        if privacy_default is not None:
            entry["privacy_default"] = privacy_default
        self.save()


@dataclass(frozen=True)
class LiveCue:
    """A cue injected at runtime (key moments), visible until it expires on
    the hub's virtual clock."""

    cue: Cue
    added_at: int
    expires_at: int


class HubError(ValueError):
    """Domain-level rejection of a well-formed message; session state unchanged."""


class Hub:
    def __init__(self, config: EngineConfig | None = None, track: AmbientTrack | None = None):
        self.config = config or EngineConfig()
        self.now_ms = 0
        self.displays: dict[str, DisplayRegistration] = {}
        self.attention: dict[str, attn.SurfaceAttentionState] = {}
        self.token = ControlToken()
        self.polls: dict[str, Poll] = {}
        self.preferences = Preferences.load(self.config.preferences_path)
        self.presence: dict[str, bool] = {}
        self.sports = SportsDesk(
            field_spec=FieldSpec(),
            d_max_m=self.config.d_max_m,
            heatmap_rows=self.config.heatmap_rows,
            heatmap_cols=self.config.heatmap_cols,
            last_n=self.config.last_n,
        )
        self.layout = layout_mod.SurfaceLayout(
            width=self.config.table_width,
            height=self.config.table_height,
            grid_step=self.config.grid_step,
        )
        self.live_cues: list[LiveCue] = []
        self.casts: dict[str, dict[str, Any]] = {}  # role value -> cast entry
        self.wizard_content: dict[str, dict[str, Any]] = {}  # role value -> shown content
        self.environment: dict[str, Any] = {}
        self.actuator_log: list[dict[str, Any]] = []
        self.outbound_log: list[dict[str, Any]] = []
        self._out_seq = 0
        self._last_sent: dict[str, dict[str, Any]] = {}
        self._panel_counter = 0

        self.track: AmbientTrack | None = None
        self.scheduler: CueScheduler | None = None
        self.clock: MediaClock | None = None
        self.timeline_state = TimelineState()
        self.plot: PlotTrack | None = None
        if track is not None:
            self.load_track(track)
        elif self.config.track_path:
            from .model import parse_track

            self.load_track(parse_track(Path(self.config.track_path).read_text(encoding="utf-8")))

    # ------------------------------------------------------------------
    # setup

    def load_track(self, track: AmbientTrack) -> list[dict[str, Any]]:
        """Attach a media track; fires environment actions for position 0."""
        self.track = track
        self.scheduler = CueScheduler(track)
        self.clock = MediaClock(duration_ms=track.duration_ms)
        self.timeline_state = TimelineState()
        self.plot = parse_plot(track)
        result = self.scheduler.advance(self.timeline_state, 0, 0)
        self.timeline_state = result.state
        return [self._fire_action(cue) for cue in sorted(result.actions_to_fire, key=lambda c: c.id)]

    def _fire_action(self, cue: Cue) -> dict[str, Any]:
        actuator = cue.content.payload["actuator"]
        value = cue.content.payload["value"]
        self.environment[actuator] = value
        entry = {"t": self.now_ms, "actuator": actuator, "value": value, "cue": cue.id}
        self.actuator_log.append(entry)
        return entry

    # ------------------------------------------------------------------
    # message loop

    def handle_message(self, message: dict[str, Any], sender: str | None = None) -> list[Outbound]:
        """Apply one inbound envelope; returns the outbound messages it caused.

        A malformed or rejected message produces a single error reply and
        leaves session state untouched.
        """
        del sender  # routing is the transport's concern; kept for adapters
        out = self._dispatch(message)
        self.outbound_log.extend(o.message for o in out)
        return out

    def _dispatch(self, message: dict[str, Any]) -> list[Outbound]:
        seq = message.get("seq") if isinstance(message, dict) else None
        try:
            mtype, payload = check_envelope(message)
            handler = getattr(self, "_handle_" + mtype.replace("-", "_"))
            return handler(payload, seq)
        except (ProtocolError, HubError, TokenError, FeedError, TransportError,
                layout_mod.LayoutError) as exc:
            return [self._reply("error", {"re": seq, "reason": str(exc)})]

    def _next_seq(self) -> int:
        self._out_seq += 1
        return self._out_seq

    def _reply(self, mtype: str, payload: dict[str, Any]) -> Outbound:
        return Outbound(to=TO_SENDER, message=envelope(mtype, self._next_seq(), payload))

    def _broadcast(self, mtype: str, payload: dict[str, Any]) -> Outbound:
        return Outbound(to=TO_ALL, message=envelope(mtype, self._next_seq(), payload))

    def _to_display(self, display_id: str, mtype: str, payload: dict[str, Any]) -> Outbound:
        return Outbound(to=display_id, message=envelope(mtype, self._next_seq(), payload))

    # -- handlers -------------------------------------------------------

    def _handle_register(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        display_id = payload.get("display_id")
        if not isinstance(display_id, str) or not display_id:
            raise ProtocolError("register needs a display_id")
        try:
            role = DisplayRole(payload.get("role"))
        except ValueError:
            raise ProtocolError(f"unknown display role {payload.get('role')!r}") from None
        existing = self.displays.get(display_id)
        if existing is not None:
            # Reconnect recovery: identical registration just gets a fresh
            # snapshot; anything else is a conflicting duplicate.
            if existing.role is role and existing.user == payload.get("user"):
                out = [self._reply("ack", {"re": seq, "registered": display_id})]
                out.extend(self._refresh(snapshot_for=display_id))
                return out
            raise HubError(f"duplicate display id {display_id!r}")
        if role in SHARED_ROLES and any(r.role is role for r in self.displays.values()):
            raise HubError(f"role-occupied: {role.value}")
        user = payload.get("user")
        if role is DisplayRole.PERSONAL and not user:
            raise HubError("personal displays must be bound to a user")
        capabilities = frozenset(payload.get("capabilities", []))
        registration = DisplayRegistration(
            display_id=display_id, role=role, capabilities=capabilities, user=user
        )
        self.displays[display_id] = registration
        self.attention[display_id] = attn.SurfaceAttentionState(
            display_id=display_id, last_input_at=self.now_ms
        )
        if user:
            self.presence.setdefault(user, True)
        out = [self._reply("ack", {"re": seq, "registered": display_id})]
        out.extend(self._refresh(snapshot_for=display_id))
        return out

    def _handle_transport(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        if self.clock is None or self.scheduler is None:
            raise HubError("no media track loaded")
        cmd = payload.get("cmd")
        user = payload.get("user")
        if cmd not in ("play", "pause", "seek"):
            raise ProtocolError(f"unknown transport command {cmd!r}")
        if not isinstance(user, str) or not user:
            raise ProtocolError("transport needs a user")
        if not self.token.authorize(user, SHARED_CONTROL):
            raise HubError("denied: shared-display-control requires the token")
        position = payload.get("position_ms")
        old_pos = self.clock.position_ms
        new_clock = apply_transport(self.clock, cmd, position)
        self.clock = new_clock
        actions: list[dict[str, Any]] = []
        if cmd == "seek":
            result = self.scheduler.advance(
                self.timeline_state, old_pos, new_clock.position_ms, is_seek=True
            )
            self.timeline_state = result.state
            actions = [self._fire_action(c) for c in sorted(result.actions_to_fire, key=lambda c: c.id)]
        out = [self._reply("ack", {"re": seq, "transport": cmd})]
        out.extend(self._broadcast("actuator", a) for a in actions)
        out.extend(self._refresh())
        return out

    def _handle_input_event(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        display_id = payload.get("display_id")
        if display_id not in self.displays:
            raise HubError(f"unknown display {display_id!r}")
        kind = payload.get("kind")
        if kind not in attn.INPUT_KINDS:
            raise ProtocolError(f"unknown input kind {kind!r}")
        action = payload.get("action")
        out = [self._reply("ack", {"re": seq, "input": kind})]
        if action in ("open-panel", "move-panel", "rotate-panel"):
            if self.displays[display_id].role is not DisplayRole.AUGMEN_TABLE:
                raise HubError("panel gestures only apply to the table surface")
            if action == "open-panel":
                seat = payload.get("seat", "left")
                panel_id = payload.get("panel_id")
                auto_id = not panel_id
                if auto_id:
                    panel_id = f"panel-{self._panel_counter + 1:03d}"
                self.layout = layout_mod.place_panel(
                    self.layout,
                    panel_id,
                    (float(payload.get("w", 40)), float(payload.get("h", 30))),
                    seat,
                )
                if auto_id:
                    self._panel_counter += 1
            elif action == "move-panel":
                self.layout = layout_mod.move_panel(
                    self.layout, payload.get("panel_id", ""), payload.get("x", 0), payload.get("y", 0)
                )
            else:
                self.layout = layout_mod.rotate_panel(
                    self.layout, payload.get("panel_id", ""), int(payload.get("turns", 1))
                )
        event = attn.InputEvent(kind=kind, action=action if action in ("activate", "deactivate") else None)
        self.attention[display_id] = attn.on_input(self.attention[display_id], event, self.now_ms)
        out.extend(self._refresh())
        return out

    def _handle_token_op(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        op = payload.get("op")
        user = payload.get("user")
        if not isinstance(user, str) or not user:
            raise ProtocolError("token-op needs a user")
        if op == "request":
            self.token = self.token.request(user)
        elif op == "pass":
            to = payload.get("to")
            if not isinstance(to, str) or not to:
                raise ProtocolError("token pass needs a target user")
            self.token = self.token.pass_to(user, to)
        elif op == "release":
            self.token = self.token.release(user)
        else:
            raise ProtocolError(f"unknown token op {op!r}")
        out = [self._reply("ack", {"re": seq, "token": self.token.to_wire()})]
        out.extend(self._refresh())
        return out

    def _handle_poll_op(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        op = payload.get("op")
        poll_id = payload.get("poll_id")
        if not isinstance(poll_id, str) or not poll_id:
            raise ProtocolError("poll-op needs a poll_id")
        if op == "open":
            options = payload.get("options")
            if not isinstance(options, list) or len(options) < 2:
                raise HubError("a poll needs at least 2 options")
            if poll_id in self.polls:
                raise HubError(f"duplicate poll id {poll_id!r}")
            self.polls[poll_id] = Poll(
                poll_id=poll_id,
                question=str(payload.get("question", "")),
                options=tuple(str(o) for o in options),
            )
        elif op == "vote":
            user = payload.get("user")
            option = payload.get("option")
            if not isinstance(user, str) or not user:
                raise ProtocolError("vote needs a user")
            poll = self.polls.get(poll_id)
            if poll is None:
                raise HubError(f"unknown poll {poll_id!r}")
            if poll.state != "open":
                raise HubError("poll-closed")
            if option not in poll.options:
                raise HubError(f"unknown option {option!r}")
            privacy = payload.get("privacy") or self.preferences.privacy_default(user)
            if privacy not in ("public", "private"):
                raise ProtocolError(f"unknown privacy setting {privacy!r}")
            poll.votes[user] = (option, privacy)
        elif op == "close":
            poll = self.polls.get(poll_id)
            if poll is None:
                raise HubError(f"unknown poll {poll_id!r}")
            poll.state = "closed"
        else:
            raise ProtocolError(f"unknown poll op {op!r}")
        out = [self._reply("ack", {"re": seq, "poll": poll_id})]
        out.extend(self._refresh())
        return out

    def _handle_cast(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        user = payload.get("user")
        if not isinstance(user, str) or not user:
            raise ProtocolError("cast needs a user")
        try:
            target = DisplayRole(payload.get("target"))
        except ValueError:
            raise HubError(f"unknown target {payload.get('target')!r}") from None
        if target not in SHARED_ROLES:
            raise HubError(f"unknown target {target.value!r}: casts go to shared displays")
        content = payload.get("content")
        if not isinstance(content, dict) or "kind" not in content:
            raise ProtocolError("cast needs content {kind, payload}")
        if content["kind"] not in CONTENT_KINDS:
            raise ProtocolError(f"unknown content kind {content['kind']!r}")
        if not self.token.authorize(user, SHARED_CAST):
            return [self._reply("error", {"re": seq, "reason": "denied: cast requires the token"})]
        self.casts[target.value] = {
            "user": user,
            "kind": content["kind"],
            "payload": content.get("payload", {}),
            "at": self.now_ms,
        }
        out = [self._reply("ack", {"re": seq, "cast": target.value})]
        out.extend(self._refresh())
        return out

    def _handle_object_detect(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        raw = payload.get("rect")
        if not isinstance(raw, dict):
            raise ProtocolError("object-detect needs a rect {x, y, w, h}")
        try:
            rect = layout_mod.Rect(
                float(raw["x"]), float(raw["y"]), float(raw["w"]), float(raw["h"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"bad rect: {exc}") from None
        present = payload.get("present", True)
        if present:
            self.layout = layout_mod.add_obstacle(self.layout, rect)
        else:
            self.layout = layout_mod.remove_obstacle(self.layout, rect)
        out = [self._reply("ack", {"re": seq, "obstacles": len(self.layout.obstacles)})]
        out.extend(self._refresh())
        return out

    def _handle_clock_sync(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        now = payload.get("now_ms")
        if not isinstance(now, int):
            raise ProtocolError("clock-sync needs integer now_ms")
        if now < self.now_ms:
            raise HubError(f"clock regression: {now} < {self.now_ms}")
        dt = now - self.now_ms
        self.now_ms = now
        actions: list[dict[str, Any]] = []
        if self.clock is not None and self.scheduler is not None and dt > 0:
            old_pos = self.clock.position_ms
            self.clock = self.clock.tick(dt)
            result = self.scheduler.advance(self.timeline_state, old_pos, self.clock.position_ms)
            self.timeline_state = result.state
            actions = [self._fire_action(c) for c in sorted(result.actions_to_fire, key=lambda c: c.id)]
        self.live_cues = [lc for lc in self.live_cues if lc.expires_at > self.now_ms]
        out = [self._reply("ack", {"re": seq, "now_ms": self.now_ms})]
        out.extend(self._broadcast("actuator", a) for a in actions)
        out.extend(self._refresh())
        return out

    def _handle_wizard_inject(self, payload: dict[str, Any], seq: int | None) -> list[Outbound]:
        kind = payload.get("kind")
        if kind == "message":
            inner = payload.get("message")
            if not isinstance(inner, dict):
                raise ProtocolError("wizard message injection needs a message object")
            out = [self._reply("ack", {"re": seq, "injected": "message"})]
            out.extend(self._dispatch(inner))
            return out
        if kind == "feed-event":
            event = payload.get("event")
            if not isinstance(event, dict):
                raise ProtocolError("feed injection needs an event object")
            injected = self.sports.ingest(event)
            out = [self._reply("ack", {"re": seq, "injected": "feed-event"})]
            out.extend(self._absorb_injected_cues(injected))
            out.extend(self._refresh())
            return out
        if kind == "presence":
            user = payload.get("user")
            if not isinstance(user, str) or not user:
                raise ProtocolError("presence injection needs a user")
            self.presence[user] = bool(payload.get("present", True))
            out = [self._reply("ack", {"re": seq, "injected": "presence"})]
            out.extend(self._refresh())
            return out
        if kind == "environment":
            actuator = payload.get("actuator")
            if not isinstance(actuator, str) or not actuator:
                raise ProtocolError("environment injection needs an actuator")
            value = payload.get("value")
            self.environment[actuator] = value
            entry = {"t": self.now_ms, "actuator": actuator, "value": value, "cue": None}
            self.actuator_log.append(entry)
            out = [self._reply("ack", {"re": seq, "injected": "environment"})]
            out.append(self._broadcast("actuator", entry))
            out.extend(self._refresh())
            return out
        if kind == "show":
            content = payload.get("content")
            if not isinstance(content, dict) or "kind" not in content:
                raise ProtocolError("show injection needs content {kind, payload}")
            try:
                role = DisplayRole(payload.get("target"))
            except ValueError:
                raise ProtocolError(f"unknown target {payload.get('target')!r}") from None
            self.wizard_content[role.value] = {
                "kind": content["kind"],
                "payload": content.get("payload", {}),
                "at": self.now_ms,
            }
            out = [self._reply("ack", {"re": seq, "injected": "show"})]
            out.extend(self._refresh())
            return out
        raise ProtocolError(f"unknown wizard injection kind {kind!r}")

    def _absorb_injected_cues(self, cues: list[Cue]) -> list[Outbound]:
        """Injected cues become live content; VAR poll cues also open a poll."""
        out: list[Outbound] = []
        for cue in cues:
            self.live_cues.append(
                LiveCue(cue=cue, added_at=self.now_ms, expires_at=self.now_ms + INJECTED_CUE_WINDOW_MS)
            )
            if cue.kind == "poll":
                poll_id = str(cue.content.payload.get("poll_id", cue.id))
                if poll_id not in self.polls:
                    self.polls[poll_id] = Poll(
                        poll_id=poll_id,
                        question=str(cue.content.payload.get("question", "")),
                        options=tuple(str(o) for o in cue.content.payload.get("options", [])),
                    )
        return out

    # ------------------------------------------------------------------
    # composition

    def _present_users(self) -> list[str]:
        users = {
            r.user
            for r in self.displays.values()
            if r.user and self.presence.get(r.user, True)
        }
        return sorted(users)

    def _interest_union(self) -> set[str]:
        interests: set[str] = set()
        for user in self._present_users():
            interests |= self.preferences.interests(user)
        return interests

    def _cues_for_role(self, role: DisplayRole, surface_active: bool, interests: set[str]) -> list[Cue]:
        """Track + live cues visible on a role right now.

        On-demand cues show when the surface is activated; cues matching a
        present user's interests auto-activate (and count as auto content for
        attention purposes).
        """
        cues: list[Cue] = []
        if self.scheduler is not None:
            for cue_id in self.timeline_state.active:
                cue = self.scheduler.cue(cue_id)
                if cue.target is not role or cue.kind == ENVIRONMENT_ACTION:
                    continue
                if cue.activation is Activation.ON_DEMAND:
                    if cue.kind in interests:
                        cue = replace(cue, activation=Activation.AUTO)
                    elif not surface_active:
                        continue
                cues.append(cue)
        for live in self.live_cues:
            if live.expires_at > self.now_ms and live.cue.target is role:
                cues.append(live.cue)
        cues.sort(key=render_order_key)
        return cues

    def _attention_cues(self, role: DisplayRole, content: list[Cue]) -> list[Cue]:
        """Content driving the attention mode: visible cues plus pseudo-cues
        for focus overlays (casts, wizard content, open polls on the wall)."""
        cues = list(content)
        overlay_sources = []
        if role.value in self.casts:
            overlay_sources.append("cast")
        if role.value in self.wizard_content:
            overlay_sources.append("wizard")
        if role is DisplayRole.SURROUND_WALL and any(
            p.state == "open" for p in self.polls.values()
        ):
            overlay_sources.append("poll")
        for source in overlay_sources:
            cues.append(
                Cue(
                    id=f"overlay-{source}-{role.value}",
                    start_ms=0,
                    end_ms=1,
                    target=role,
                    content=ContentDescriptor(kind="stat", payload={}),
                    attention=AttentionLevel.FOCUS,
                    activation=Activation.AUTO,
                )
            )
        return cues

    def _step_attention(self) -> None:
        interests = self._interest_union()
        for display_id in sorted(self.displays):
            registration = self.displays[display_id]
            state = self.attention[display_id]
            if registration.role not in MEDIATED_ROLES:
                pinned = replace(
                    state,
                    mode=attn.SurfaceMode.FOCUS,
                    brightness=self.config.attention.brightness_for(attn.SurfaceMode.FOCUS),
                    pulsing=False,
                )
                self.attention[display_id] = pinned
                continue
            content = self._cues_for_role(registration.role, state.on_demand_active, interests)
            cues = self._attention_cues(registration.role, content)
            self.attention[display_id] = attn.step(state, self.now_ms, cues, self.config.attention)

    def compose(self) -> dict[str, dict[str, Any]]:
        """Render state for every registered display; pure read of session state."""
        interests = self._interest_union()
        polls_wire = [self.polls[pid].aggregates() for pid in sorted(self.polls)]
        token_wire = self.token.to_wire()
        env_wire = dict(sorted(self.environment.items()))
        states: dict[str, dict[str, Any]] = {}
        for display_id in sorted(self.displays):
            registration = self.displays[display_id]
            role = registration.role
            state = self.attention[display_id]
            if role is DisplayRole.PERSONAL:
                user_interests = self.preferences.interests(registration.user or "")
                content = self._cues_for_role(role, state.on_demand_active, user_interests)
            else:
                content = self._cues_for_role(role, state.on_demand_active, interests)
            render: dict[str, Any] = {
                "display_id": display_id,
                "role": role.value,
                "mode": state.mode.wire,
                "brightness": state.brightness,
                "content": [self._cue_wire(c) for c in content],
                "token": token_wire,
                "environment": env_wire,
                "polls": [],
                "cast": None,
                "wizard": None,
                "media": None,
                "sports": None,
                "plot": None,
                "panels": None,
            }
            if role in (DisplayRole.SURROUND_WALL, DisplayRole.PERSONAL):
                render["polls"] = polls_wire
            render["cast"] = self.casts.get(role.value)
            render["wizard"] = self.wizard_content.get(role.value)
            if role is DisplayRole.PRIMARY_TV:
                render["media"] = self._media_wire()
                render["sports"] = {"matches": self._match_panes(with_avatars=False)}
            if role is DisplayRole.AUGMEN_TABLE:
                render["sports"] = {"matches": self._match_panes(with_avatars=True)}
                render["panels"] = [p.to_wire() for p in self.layout.panels]
                render["plot"] = self._plot_frame()
            states[display_id] = render
        return states

    def _cue_wire(self, cue: Cue) -> dict[str, Any]:
        wire = cue.to_wire()
        wire["source"] = "live" if any(lc.cue.id == cue.id for lc in self.live_cues) else "track"
        return wire

    def _media_wire(self) -> dict[str, Any] | None:
        if self.clock is None or self.track is None:
            return None
        return {
            "media_id": self.track.media_id,
            "position_ms": self.clock.position_ms,
            "duration_ms": self.track.duration_ms,
            "rate": str(self.clock.rate),
            "state": "playing" if self.clock.playing else "paused",
        }

    def _match_panes(self, with_avatars: bool) -> list[dict[str, Any]]:
        panes = []
        for match_id in sorted(self.sports.matches):
            match = self.sports.matches[match_id]
            pane: dict[str, Any] = {
                "match_id": match_id,
                "home": match.home_team,
                "away": match.away_team,
                "score": list(match.score),
                "phase": match.phase,
                "clock_ms": match.clock_ms,
            }
            if with_avatars:
                pane["avatars"] = self.sports.avatar_states(match_id)
            panes.append(pane)
        return panes

    def _plot_frame(self) -> dict[str, Any] | None:
        if self.plot is None or self.clock is None:
            return None
        t = min(self.clock.position_ms, self.plot.duration_ms - 1)
        return map_frame(self.plot, t)

    # ------------------------------------------------------------------
    # diff emission

    def _refresh(self, snapshot_for: str | None = None) -> list[Outbound]:
        """Re-step attention, recompose, and emit snapshot/diff messages."""
        self._step_attention()
        states = self.compose()
        out: list[Outbound] = []
        for display_id in sorted(states):
            state = states[display_id]
            previous = self._last_sent.get(display_id)
            if display_id == snapshot_for or previous is None:
                out.append(self._to_display(display_id, "snapshot", {"state": state}))
            else:
                changes = {
                    key: value for key, value in state.items() if previous.get(key) != value
                }
                if changes:
                    out.append(
                        self._to_display(
                            display_id, "diff", {"display_id": display_id, "changes": changes}
                        )
                    )
            self._last_sent[display_id] = state
        return out
