"""Media transport clock and seek-correct cue scheduling.

The clock keeps an exact rational position so that non-integer playback rates
never drift; the integer-millisecond position is derived on read. Cue
scheduling is edge-triggered: ``advance`` reports which cues were entered and
exited between two positions and which environment actions must fire. Leaving
a window (playback or seek, either direction) re-arms its action, so the
environment always converges to the state of the landing position.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace
from fractions import Fraction

from .model import Activation, AmbientTrack, Cue, DisplayRole, ENVIRONMENT_ACTION


class TransportError(ValueError):
    """Raised on invalid transport commands (e.g. seek out of range)."""


@dataclass(frozen=True)
class MediaClock:
    duration_ms: int
    position: Fraction = Fraction(0)
    rate: Fraction = Fraction(1)
    playing: bool = False

    @property
    def position_ms(self) -> int:
        return int(self.position)

    def tick(self, wall_dt_ms: int) -> "MediaClock":
        """Advance by wall time; paused clocks do not move."""
        if wall_dt_ms < 0:
            raise TransportError("wall_dt must be >= 0")
        if not self.playing:
            return self
        new_pos = min(Fraction(self.duration_ms), self.position + self.rate * wall_dt_ms)
        return replace(self, position=new_pos)

    def play(self) -> "MediaClock":
        return replace(self, playing=True)

    def pause(self) -> "MediaClock":
        return replace(self, playing=False)

    def seek(self, t_ms: int) -> "MediaClock":
        """Jump to an absolute position; play/pause state is preserved."""
        if not 0 <= t_ms <= self.duration_ms:
            raise TransportError(f"seek target {t_ms} outside [0, {self.duration_ms}]")
        return replace(self, position=Fraction(t_ms))

    def set_rate(self, rate: Fraction) -> "MediaClock":
        if rate < 0:
            raise TransportError("rate must be >= 0")
        return replace(self, rate=rate)


def apply_transport(clock: MediaClock, cmd: str, position_ms: int | None = None) -> MediaClock:
    if cmd == "play":
        return clock.play()
    if cmd == "pause":
        return clock.pause()
    if cmd == "seek":
        if position_ms is None:
            raise TransportError("seek requires a position")
        return clock.seek(position_ms)
    raise TransportError(f"unknown transport command {cmd!r}")


@dataclass(frozen=True)
class TimelineState:
    """Active-cue and fired-action bookkeeping for one track.

    ``fired`` holds ids of environment-action cues that already fired for the
    *current* entry into their window; it is trimmed to the active set on
    every advance, which is what makes re-entry fire again.
    """

    active: frozenset[str] = frozenset()
    fired: frozenset[str] = frozenset()


@dataclass(frozen=True)
class AdvanceResult:
    state: TimelineState
    entered: frozenset[Cue]
    exited: frozenset[Cue]
    actions_to_fire: frozenset[Cue]


class CueScheduler:
    """Incremental active-set computation over a canonical track.

    Candidates are found by bisecting the start-sorted cue list, then filtered
    by end time. Independent of (and checked against) the linear-scan
    reference ``model.cues_at``.
    """

    def __init__(self, track: AmbientTrack) -> None:
        self.track = track
        self._by_id = {cue.id: cue for cue in track.cues}
        self._starts = [cue.start_ms for cue in track.cues]

    def active_at(self, t_ms: int) -> frozenset[Cue]:
        """Active set at any playhead position in [0, duration].

        Position == duration is legal for the transport and has an empty
        active set, since every window lies inside [0, duration).
        """
        if not 0 <= t_ms <= self.track.duration_ms:
            raise ValueError(f"position {t_ms} outside [0, {self.track.duration_ms}]")
        hi = bisect_right(self._starts, t_ms)
        return frozenset(c for c in self.track.cues[:hi] if c.end_ms > t_ms)

    def cue(self, cue_id: str) -> Cue:
        return self._by_id[cue_id]

    def advance(
        self,
        state: TimelineState,
        old_pos_ms: int,
        new_pos_ms: int,
        is_seek: bool = False,
    ) -> AdvanceResult:
        """Move the playhead and report edge transitions.

        An environment action fires iff its cue is entered and has not fired
        for this entry; contiguous playback through a window therefore fires
        exactly once, while seeking out and back in fires again.
        """
        del old_pos_ms, is_seek  # same declarative rule for playback and seeks
        new_active = self.active_at(new_pos_ms)
        new_ids = frozenset(c.id for c in new_active)
        old_ids = state.active
        entered = frozenset(c for c in new_active if c.id not in old_ids)
        exited = frozenset(self._by_id[i] for i in old_ids - new_ids)
        to_fire = frozenset(
            c for c in entered if c.kind == ENVIRONMENT_ACTION and c.id not in state.fired
        )
        action_ids_active = frozenset(
            c.id for c in new_active if c.kind == ENVIRONMENT_ACTION
        )
        fired = (state.fired & action_ids_active) | frozenset(c.id for c in to_fire)
        return AdvanceResult(
            state=TimelineState(active=new_ids, fired=fired),
            entered=entered,
            exited=exited,
            actions_to_fire=to_fire,
        )


def render_order_key(cue: Cue) -> tuple:
    """Ordering for per-display content lists: priority desc, attention desc,
    start asc, id asc."""
    return (-cue.priority, -int(cue.attention), cue.start_ms, cue.id)


def active_render_set(
    track: AmbientTrack,
    state: TimelineState,
    surface_active: dict[DisplayRole, bool],
) -> dict[DisplayRole, list[Cue]]:
    """Per-role render lists from the active set.

    Auto cues are always included; on-demand cues only when the surface has
    been activated (gesture/voice). Environment actions never render.
    """
    by_id = {c.id: c for c in track.cues}
    out: dict[DisplayRole, list[Cue]] = {role: [] for role in DisplayRole}
    for cue_id in state.active:
        cue = by_id[cue_id]
        if cue.kind == ENVIRONMENT_ACTION:
            continue
        if cue.activation is Activation.ON_DEMAND and not surface_active.get(cue.target, False):
            continue
        out[cue.target].append(cue)
    for role in out:
        out[role].sort(key=render_order_key)
    return out
