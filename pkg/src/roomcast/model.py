"""Domain vocabulary and the ambient-track sidecar document.

An ambient track is a timeline-keyed list of cues, one sidecar document per
piece of media. Each cue carries a half-open time window, a target display
role, a content descriptor, an attention level, and an activation mode.
Everything in here is an immutable value type; parse once, share freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Any, Iterator


class TrackError(ValueError):
    """Raised when an ambient-track document cannot be parsed or is invalid."""


class DisplayRole(str, Enum):
    PRIMARY_TV = "primary-tv"
    SURROUND_WALL = "surround-wall"
    AUGMEN_TABLE = "augmen-table"
    PERSONAL = "personal"

    @classmethod
    def from_wire(cls, value: str) -> "DisplayRole":
        try:
            return cls(value)
        except ValueError:
            raise TrackError(f"unknown display role {value!r}") from None


class AttentionLevel(IntEnum):
    """How strongly content should claim the viewer's gaze; total order."""

    AMBIENT = 0
    GLANCE = 1
    FOCUS = 2

    @property
    def wire(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, value: str) -> "AttentionLevel":
        try:
            return cls[value.upper()]
        except KeyError:
            raise TrackError(f"unknown attention level {value!r}") from None


class Activation(str, Enum):
    AUTO = "auto"
    ON_DEMAND = "on-demand"

    @classmethod
    def from_wire(cls, value: str) -> "Activation":
        try:
            return cls(value)
        except ValueError:
            raise TrackError(f"unknown activation {value!r}") from None


#: Content kinds accepted in v1 track documents, with the payload keys each
#: kind requires. The list is closed for the file format; in-memory content
#: descriptors used elsewhere (casts, mockups) may carry any of these kinds.
CONTENT_KINDS: dict[str, tuple[str, ...]] = {
    "soundtrack": (),
    "actor": (),
    "location": (),
    "stat": (),
    "replay-video": (),
    "poll": ("options",),
    "news": (),
    "lineup": (),
    "environment-action": ("actuator", "value"),
}

ENVIRONMENT_ACTION = "environment-action"


@dataclass(frozen=True)
class ContentDescriptor:
    """One unit of complementary content: a kind plus kind-specific payload.

    The payload stays out of the hash (dicts are unhashable) but counts for
    equality; treat it as immutable after construction.
    """

    kind: str
    payload: dict[str, Any] = field(default_factory=dict, hash=False)

    def problems(self) -> list[str]:
        """Payload-rule violations for this descriptor (empty when valid)."""
        issues: list[str] = []
        required = CONTENT_KINDS.get(self.kind)
        if required is None:
            return [f"unknown kind {self.kind!r}"]
        for key in required:
            if key not in self.payload:
                issues.append(f"{self.kind} payload missing required key {key!r}")
        if self.kind == "poll":
            options = self.payload.get("options")
            if options is not None and (not isinstance(options, list) or len(options) < 2):
                issues.append("poll payload needs at least 2 options")
        return issues

    def to_wire(self) -> dict[str, Any]:
        return {"kind": self.kind, "payload": dict(self.payload)}


@dataclass(frozen=True)
class Cue:
    """One timed unit of complementary content. Window is half-open [start, end)."""

    id: str
    start_ms: int
    end_ms: int
    target: DisplayRole
    content: ContentDescriptor
    attention: AttentionLevel
    activation: Activation
    priority: int = 0

    @property
    def kind(self) -> str:
        return self.content.kind

    def contains(self, t_ms: int) -> bool:
        return self.start_ms <= t_ms < self.end_ms

    def to_wire(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "target": self.target.value,
            "kind": self.content.kind,
            "attention": self.attention.wire,
            "activation": self.activation.value,
            "priority": self.priority,
            "payload": dict(self.content.payload),
        }


@dataclass(frozen=True)
class AmbientTrack:
    """Canonical parsed track: cues sorted by (start, id), all invariants checked.

    ``plot_section`` keeps the optional raw "plot" object from the document;
    it is parsed separately by :mod:`roomcast.plot`.
    """

    media_id: str
    duration_ms: int
    cues: tuple[Cue, ...]
    plot_section: dict[str, Any] | None = None

    def cue_by_id(self, cue_id: str) -> Cue:
        for cue in self.cues:
            if cue.id == cue_id:
                return cue
        raise KeyError(cue_id)

    def __iter__(self) -> Iterator[Cue]:
        return iter(self.cues)


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    cue_id: str | None
    message: str


def _canonical_sort(cues: list[Cue]) -> tuple[Cue, ...]:
    # Stable canonical order: by start, ties broken by id (lexicographic).
    return tuple(sorted(cues, key=lambda c: (c.start_ms, c.id)))


def _cue_from_raw(raw: dict[str, Any]) -> Cue:
    try:
        cue_id = raw["id"]
        start = raw["start_ms"]
        end = raw["end_ms"]
        target = raw["target"]
        kind = raw["kind"]
        attention = raw["attention"]
        activation = raw["activation"]
    except KeyError as exc:
        raise TrackError(f"cue missing field {exc.args[0]!r}") from None
    if not isinstance(cue_id, str) or not cue_id:
        raise TrackError("cue id must be a non-empty string")
    if not isinstance(start, int) or not isinstance(end, int):
        raise TrackError(f"cue {cue_id!r}: start_ms/end_ms must be integers")
    priority = raw.get("priority", 0)
    if not isinstance(priority, int):
        raise TrackError(f"cue {cue_id!r}: priority must be an integer")
    payload = raw.get("payload", {})
    if not isinstance(payload, dict):
        raise TrackError(f"cue {cue_id!r}: payload must be an object")
    return Cue(
        id=cue_id,
        start_ms=start,
        end_ms=end,
        target=DisplayRole.from_wire(target),
        content=ContentDescriptor(kind=kind, payload=payload),
        attention=AttentionLevel.from_wire(attention),
        activation=Activation.from_wire(activation),
        priority=priority,
    )


def validate_track(track: AmbientTrack) -> list[ValidationIssue]:
    """Check every invariant and payload rule; issues instead of exceptions.

    Empty report iff the track is fully valid. Overlapping focus cues on the
    same target are reported as warnings (legal but usually an authoring slip).
    """
    issues: list[ValidationIssue] = []
    if track.duration_ms <= 0:
        issues.append(ValidationIssue("error", None, "duration_ms must be positive"))
    seen: set[str] = set()
    for cue in track.cues:
        if cue.id in seen:
            issues.append(ValidationIssue("error", cue.id, "duplicate cue id"))
        seen.add(cue.id)
        if cue.start_ms >= cue.end_ms:
            issues.append(ValidationIssue("error", cue.id, "start >= end"))
        if cue.start_ms < 0 or cue.end_ms > track.duration_ms:
            issues.append(ValidationIssue("error", cue.id, "cue window exceeds track duration"))
        for problem in cue.content.problems():
            issues.append(ValidationIssue("error", cue.id, problem))
        if cue.kind == ENVIRONMENT_ACTION and cue.activation is not Activation.AUTO:
            issues.append(
                ValidationIssue("error", cue.id, "environment-action cues must be auto-activated")
            )
    focus = [c for c in track.cues if c.attention is AttentionLevel.FOCUS]
    for i, a in enumerate(focus):
        for b in focus[i + 1 :]:
            if a.target is b.target and a.start_ms < b.end_ms and b.start_ms < a.end_ms:
                issues.append(
                    ValidationIssue(
                        "warning",
                        a.id,
                        f"focus cues {a.id!r} and {b.id!r} overlap on {a.target.value}",
                    )
                )
    return issues


def parse_track(document: bytes | str) -> AmbientTrack:
    """Parse and validate an ambient-track document into canonical form.

    Raises TrackError on malformed JSON, schema violations, or any
    error-severity validation finding.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TrackError(f"document is not UTF-8: {exc}") from None
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise TrackError(f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise TrackError("document root must be an object")
    media_id = raw.get("media_id")
    duration = raw.get("duration_ms")
    if not isinstance(media_id, str) or not media_id:
        raise TrackError("media_id must be a non-empty string")
    if not isinstance(duration, int) or duration <= 0:
        raise TrackError("duration_ms must be a positive integer")
    raw_cues = raw.get("cues", [])
    if not isinstance(raw_cues, list):
        raise TrackError("cues must be a list")
    cues = [_cue_from_raw(c) for c in raw_cues]
    plot_section = raw.get("plot")
    if plot_section is not None and not isinstance(plot_section, dict):
        raise TrackError("plot section must be an object")
    track = AmbientTrack(
        media_id=media_id,
        duration_ms=duration,
        cues=_canonical_sort(cues),
        plot_section=plot_section,
    )
    errors = [i for i in validate_track(track) if i.severity == "error"]
    if errors:
        first = errors[0]
        where = f"cue {first.cue_id!r}: " if first.cue_id else ""
        raise TrackError(f"{where}{first.message}")
    return track


def serialize_track(track: AmbientTrack) -> str:
    """Canonical textual form; ``parse_track(serialize_track(t)) == t``."""
    doc: dict[str, Any] = {
        "media_id": track.media_id,
        "duration_ms": track.duration_ms,
        "cues": [cue.to_wire() for cue in track.cues],
    }
    if track.plot_section is not None:
        doc["plot"] = track.plot_section
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cues_at(track: AmbientTrack, t_ms: int) -> set[Cue]:
    """Exactly the cues whose half-open window contains ``t_ms``, by linear scan.

    This is the reference implementation the incremental scheduler in
    :mod:`roomcast.timeline` is held against.
    """
    if not 0 <= t_ms < track.duration_ms:
        raise ValueError(f"t_ms {t_ms} outside [0, {track.duration_ms})")
    return {cue for cue in track.cues if cue.start_ms <= t_ms < cue.end_ms}
