"""Live sports telemetry: match/player state, fatigue, heatmaps, key moments.

Feeds are append-only event logs (newline-delimited JSON). Ingestion updates
match state deterministically and emits injected cues for key moments:
penalties and free-kicks push a focus replay to the surround wall, a VAR
review pushes a focus poll, goals bump the score and push a replay.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .model import (
    Activation,
    AttentionLevel,
    ContentDescriptor,
    Cue,
    DisplayRole,
)

MAX_PARALLEL_MATCHES = 4

#: Display window for cues injected from feed events (the paper gives no
#: duration; 30 s is configuration).
INJECTED_CUE_WINDOW_MS = 30_000


class FeedError(ValueError):
    """Raised on malformed feed records, unknown references, or time regression."""


@dataclass(frozen=True)
class FieldSpec:
    length_m: float = 105.0
    width_m: float = 68.0

    def __post_init__(self) -> None:
        if self.length_m <= 0 or self.width_m <= 0:
            raise ValueError("field dimensions must be positive")

    def segment_length_m(self, x0: float, y0: float, x1: float, y1: float) -> float:
        """Metric length of a move between two normalized positions."""
        return math.hypot((x1 - x0) * self.length_m, (y1 - y0) * self.width_m)


@dataclass
class PlayerState:
    player_id: str
    team_id: str
    name: str
    x: float | None = None
    y: float | None = None
    cumulative_distance_m: float = 0.0
    goals: int = 0
    yellow_cards: int = 0
    red_cards: int = 0
    samples: list[tuple[int, float, float]] = field(default_factory=list)
    active: bool = True

    def fatigue_index(self, d_max_m: float) -> float:
        """Normalized distance covered, clamped to [0, 1]."""
        if d_max_m <= 0:
            raise ValueError("d_max_m must be positive")
        return min(1.0, self.cumulative_distance_m / d_max_m)


@dataclass
class MatchState:
    match_id: str
    home_team: str
    away_team: str
    score: tuple[int, int] = (0, 0)
    clock_ms: int = 0
    phase: str = "pre-match"  # pre-match | live | paused | finished
    players: dict[str, PlayerState] = field(default_factory=dict)
    lineups: dict[str, list[str]] = field(default_factory=dict)
    recent_form: dict[str, list[str]] = field(default_factory=dict)
    head_to_head: list[str] = field(default_factory=list)
    last_t_ms: int = 0

    def team_score(self, team_id: str) -> int:
        if team_id == self.home_team:
            return self.score[0]
        if team_id == self.away_team:
            return self.score[1]
        raise FeedError(f"team {team_id!r} not in match {self.match_id!r}")


@dataclass(frozen=True)
class Heatmap:
    rows: int
    cols: int
    counts: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def normalized(self) -> tuple[tuple[float, ...], ...]:
        peak = max((c for row in self.counts for c in row), default=0)
        if peak == 0:
            return tuple(tuple(0.0 for _ in row) for row in self.counts)
        return tuple(tuple(c / peak for c in row) for row in self.counts)


def heatmap(samples: Iterable[tuple[int, float, float]], rows: int, cols: int) -> Heatmap:
    """Bin normalized positions into a rows x cols grid.

    Cell (r, c) = (floor(y*rows), floor(x*cols)), clamped so x or y exactly
    1.0 lands in the last row/column.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    grid = [[0] * cols for _ in range(rows)]
    for _t, x, y in samples:
        r = min(int(y * rows), rows - 1)
        c = min(int(x * cols), cols - 1)
        grid[r][c] += 1
    return Heatmap(rows=rows, cols=cols, counts=tuple(tuple(row) for row in grid))


def _formation_slot(match: MatchState, player_id: str) -> tuple[float, float]:
    """Deterministic resting position for players without samples yet: home
    team spread down the left half, away down the right."""
    for team, xline in ((match.home_team, 0.25), (match.away_team, 0.75)):
        lineup = match.lineups.get(team, [])
        if player_id in lineup:
            idx = lineup.index(player_id)
            return (xline, (idx + 1) / (len(lineup) + 1))
    return (0.5, 0.5)


@dataclass
class SportsDesk:
    """Registry and ingest pipeline for up to four parallel matches."""

    field_spec: FieldSpec = field(default_factory=FieldSpec)
    d_max_m: float = 12_000.0
    heatmap_rows: int = 16
    heatmap_cols: int = 24
    last_n: int = 5  # recent-form window
    matches: dict[str, MatchState] = field(default_factory=dict)
    _cue_counter: int = 0

    def add_match(self, descriptor: dict[str, Any]) -> list[Cue]:
        """Register a match and emit its pre-match wall cues (lineups, form,
        head-to-head). Caps at four parallel matches."""
        match_id = descriptor.get("match_id")
        if not match_id:
            raise FeedError("match descriptor missing match_id")
        if match_id in self.matches:
            raise FeedError(f"duplicate match id {match_id!r}")
        if len(self.matches) >= MAX_PARALLEL_MATCHES:
            raise FeedError(
                f"capacity-exceeded: at most {MAX_PARALLEL_MATCHES} parallel matches"
            )
        home = descriptor.get("home", "home")
        away = descriptor.get("away", "away")
        match = MatchState(match_id=match_id, home_team=home, away_team=away)
        for team, entries in (descriptor.get("lineups") or {}).items():
            ids = []
            for entry in entries:
                player = PlayerState(
                    player_id=entry["player_id"],
                    team_id=team,
                    name=entry.get("name", entry["player_id"]),
                )
                match.players[player.player_id] = player
                ids.append(player.player_id)
            match.lineups[team] = ids
        match.recent_form = {
            team: list(results)[-self.last_n :]
            for team, results in (descriptor.get("recent_form") or {}).items()
        }
        match.head_to_head = list(descriptor.get("head_to_head") or [])
        self.matches[match_id] = match

        cues: list[Cue] = []
        if match.lineups:
            cues.append(
                self._make_cue(
                    match_id,
                    0,
                    "lineup",
                    {"match_id": match_id, "lineups": match.lineups},
                    AttentionLevel.AMBIENT,
                )
            )
        if match.recent_form:
            cues.append(
                self._make_cue(
                    match_id,
                    0,
                    "stat",
                    {"match_id": match_id, "stat": "recent-form", "form": match.recent_form},
                    AttentionLevel.AMBIENT,
                )
            )
        if match.head_to_head:
            cues.append(
                self._make_cue(
                    match_id,
                    0,
                    "stat",
                    {
                        "match_id": match_id,
                        "stat": "head-to-head",
                        "results": match.head_to_head,
                    },
                    AttentionLevel.AMBIENT,
                )
            )
        return cues

    def _make_cue(
        self,
        match_id: str,
        t_ms: int,
        kind: str,
        payload: dict[str, Any],
        attention: AttentionLevel,
    ) -> Cue:
        self._cue_counter += 1
        return Cue(
            id=f"{match_id}-{kind}-{self._cue_counter:04d}",
            start_ms=t_ms,
            end_ms=t_ms + INJECTED_CUE_WINDOW_MS,
            target=DisplayRole.SURROUND_WALL,
            content=ContentDescriptor(kind=kind, payload=payload),
            attention=attention,
            activation=Activation.AUTO,
        )

    def _match(self, match_id: str) -> MatchState:
        try:
            return self.matches[match_id]
        except KeyError:
            raise FeedError(f"unknown match {match_id!r}") from None

    def ingest(self, event: dict[str, Any]) -> list[Cue]:
        """Apply one feed event; returns cues injected for key moments.

        Timestamps must be nondecreasing per match stream; positions update
        cumulative distance via metric segment lengths. Each event is
        validated fully before any state changes, so a rejected event leaves
        the desk untouched.
        """
        etype = event.get("type")
        if etype == "register-match":
            return self.add_match(event)
        match = self._match(event.get("match_id", ""))
        t_ms = event.get("t_ms", match.last_t_ms)
        if not isinstance(t_ms, int):
            raise FeedError(f"event t_ms must be an integer, got {t_ms!r}")
        if t_ms < match.last_t_ms:
            raise FeedError(
                f"time regression in {match.match_id!r}: {t_ms} < {match.last_t_ms}"
            )

        cues: list[Cue]
        if etype == "kick-off":
            match.phase = "live"
            cues = []
        elif etype == "final":
            match.phase = "finished"
            cues = []
        elif etype == "position-sample":
            self._apply_position(match, event, t_ms)
            cues = []
        elif etype == "goal":
            cues = self._apply_goal(match, event, t_ms)
        elif etype == "card":
            self._apply_card(match, event)
            cues = []
        elif etype in ("penalty", "free-kick"):
            cues = [
                self._make_cue(
                    match.match_id,
                    t_ms,
                    "replay-video",
                    {"match_id": match.match_id, "moment": etype, "t_ms": t_ms},
                    AttentionLevel.FOCUS,
                )
            ]
        elif etype == "var-review":
            options = event.get("options") or []
            if len(options) < 2:
                raise FeedError("var-review event needs at least 2 options")
            cues = [
                self._make_cue(
                    match.match_id,
                    t_ms,
                    "poll",
                    {
                        "match_id": match.match_id,
                        "poll_id": f"var-{match.match_id}-{t_ms}",
                        "question": event.get("question", "VAR decision?"),
                        "options": list(options),
                        "t_ms": t_ms,
                    },
                    AttentionLevel.FOCUS,
                )
            ]
        else:
            raise FeedError(f"unknown feed event type {etype!r}")

        match.last_t_ms = t_ms
        match.clock_ms = t_ms
        return cues

    def _player(self, match: MatchState, player_id: str) -> PlayerState:
        try:
            return match.players[player_id]
        except KeyError:
            raise FeedError(
                f"unknown player {player_id!r} in match {match.match_id!r}"
            ) from None

    def _apply_position(self, match: MatchState, event: dict[str, Any], t_ms: int) -> None:
        player = self._player(match, event.get("player", ""))
        x, y = event.get("x"), event.get("y")
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise FeedError("position-sample needs numeric x and y")
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise FeedError(f"position ({x}, {y}) outside the unit square")
        if player.x is not None:
            player.cumulative_distance_m += self.field_spec.segment_length_m(
                player.x, player.y, x, y
            )
        player.x, player.y = x, y
        player.samples.append((t_ms, x, y))

    def _apply_goal(self, match: MatchState, event: dict[str, Any], t_ms: int) -> list[Cue]:
        team = event.get("team")
        if team not in (match.home_team, match.away_team):
            raise FeedError(f"goal for unknown team {team!r}")
        scorer = event.get("player")
        scorer_state = self._player(match, scorer) if scorer else None
        home, away = match.score
        if team == match.home_team:
            match.score = (home + 1, away)
        else:
            match.score = (home, away + 1)
        if scorer_state is not None:
            scorer_state.goals += 1
        return [
            self._make_cue(
                match.match_id,
                t_ms,
                "replay-video",
                {
                    "match_id": match.match_id,
                    "moment": "goal",
                    "team": team,
                    "player": scorer,
                    "score": list(match.score),
                },
                AttentionLevel.FOCUS,
            )
        ]

    def _apply_card(self, match: MatchState, event: dict[str, Any]) -> None:
        player = self._player(match, event.get("player", ""))
        color = event.get("color")
        if color not in ("yellow", "red"):
            raise FeedError(f"unknown card color {color!r}")
        if color == "yellow":
            player.yellow_cards += 1
        else:
            player.red_cards += 1

    def avatar_states(self, match_id: str) -> list[dict[str, Any]]:
        """Field-view avatars: latest position (or formation slot), team side,
        goal/card badges and fatigue, one entry per active player."""
        match = self._match(match_id)
        avatars = []
        for player_id in sorted(match.players):
            player = match.players[player_id]
            if not player.active:
                continue
            if player.x is None:
                x, y = _formation_slot(match, player_id)
            else:
                x, y = player.x, player.y
            avatars.append(
                {
                    "player_id": player.player_id,
                    "name": player.name,
                    "x": x,
                    "y": y,
                    "team_color_side": "home" if player.team_id == match.home_team else "away",
                    "badges": {
                        "goals": player.goals,
                        "yellow": player.yellow_cards,
                        "red": player.red_cards,
                    },
                    "fatigue": player.fatigue_index(self.d_max_m),
                }
            )
        return avatars

    def player_heatmap(self, match_id: str, player_id: str) -> Heatmap:
        match = self._match(match_id)
        player = self._player(match, player_id)
        return heatmap(player.samples, self.heatmap_rows, self.heatmap_cols)


def read_feed(text: str) -> Iterator[dict[str, Any]]:
    """Parse a newline-delimited JSON feed document."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FeedError(f"feed line {lineno}: malformed JSON: {exc}") from None
        if not isinstance(event, dict):
            raise FeedError(f"feed line {lineno}: event must be an object")
        yield event


def replay_feed(desk: SportsDesk, text: str) -> list[Cue]:
    """Ingest an entire feed document; returns all injected cues in order."""
    injected: list[Cue] = []
    for event in read_feed(text):
        injected.extend(desk.ingest(event))
    return injected
