from __future__ import annotations

import math
import random

import pytest

from roomcast.model import AttentionLevel, DisplayRole
from roomcast.sports import (
    FeedError,
    FieldSpec,
    Heatmap,
    MAX_PARALLEL_MATCHES,
    PlayerState,
    SportsDesk,
    heatmap,
    read_feed,
)


def minimal_descriptor(match_id: str = "m1") -> dict:
    return {
        "type": "register-match",
        "match_id": match_id,
        "home": "home-fc",
        "away": "away-fc",
        "lineups": {
            "home-fc": [{"player_id": "p1", "name": "One"}],
            "away-fc": [{"player_id": "p2", "name": "Two"}],
        },
    }


# ------------------------------------------------------------- registry


def test_add_match_registers_and_emits_prematch_cues():
    desk = SportsDesk()
    cues = desk.add_match(
        {**minimal_descriptor(), "recent_form": {"home-fc": ["W"]}, "head_to_head": ["1-0"]}
    )
    assert len(desk.matches) == 1
    assert desk.matches["m1"].phase == "pre-match"
    kinds = [c.kind for c in cues]
    assert kinds == ["lineup", "stat", "stat"]
    assert all(c.target is DisplayRole.SURROUND_WALL for c in cues)


def test_fifth_match_rejected():
    desk = SportsDesk()
    for i in range(MAX_PARALLEL_MATCHES):
        desk.ingest(minimal_descriptor(f"m{i}"))
    with pytest.raises(FeedError, match="capacity-exceeded"):
        desk.ingest(minimal_descriptor("m5"))
    assert len(desk.matches) == MAX_PARALLEL_MATCHES


def test_duplicate_match_rejected():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    with pytest.raises(FeedError, match="duplicate"):
        desk.ingest(minimal_descriptor())


# ------------------------------------------------------------- ingest


def test_goal_updates_score_and_injects_replay():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    cues = desk.ingest({"type": "goal", "match_id": "m1", "team": "home-fc", "player": "p1", "t_ms": 100})
    assert desk.matches["m1"].score == (1, 0)
    assert desk.matches["m1"].players["p1"].goals == 1
    assert [c.kind for c in cues] == ["replay-video"]
    assert cues[0].attention is AttentionLevel.FOCUS


def test_var_review_injects_focus_poll_with_event_options():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    cues = desk.ingest(
        {
            "type": "var-review",
            "match_id": "m1",
            "t_ms": 500,
            "question": "Red card?",
            "options": ["yes", "no"],
        }
    )
    (cue,) = cues
    assert cue.kind == "poll"
    assert cue.attention is AttentionLevel.FOCUS
    assert cue.content.payload["options"] == ["yes", "no"]
    assert cue.target is DisplayRole.SURROUND_WALL


def test_penalty_and_free_kick_inject_focus_replays():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    for etype in ("penalty", "free-kick"):
        (cue,) = desk.ingest({"type": etype, "match_id": "m1", "t_ms": 1000})
        assert cue.kind == "replay-video"
        assert cue.attention is AttentionLevel.FOCUS


def test_position_sample_distance_oracle_from_origin():
    # (0,0) -> (0.3, 0.4) on a 105 x 68 field
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    desk.ingest({"type": "position-sample", "match_id": "m1", "player": "p1", "t_ms": 0, "x": 0.0, "y": 0.0})
    desk.ingest({"type": "position-sample", "match_id": "m1", "player": "p1", "t_ms": 40, "x": 0.3, "y": 0.4})
    expected = math.sqrt((0.3 * 105) ** 2 + (0.4 * 68) ** 2)  # independent oracle
    got = desk.matches["m1"].players["p1"].cumulative_distance_m
    assert got == pytest.approx(expected, rel=1e-12)
    assert round(got, 2) == 41.62


def test_time_regression_rejected_and_state_untouched():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    desk.ingest({"type": "position-sample", "match_id": "m1", "player": "p1", "t_ms": 100, "x": 0.5, "y": 0.5})
    before = len(desk.matches["m1"].players["p1"].samples)
    with pytest.raises(FeedError, match="time regression"):
        desk.ingest({"type": "position-sample", "match_id": "m1", "player": "p1", "t_ms": 50, "x": 0.6, "y": 0.5})
    assert len(desk.matches["m1"].players["p1"].samples) == before


def test_unknown_match_and_player_rejected():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    with pytest.raises(FeedError, match="unknown match"):
        desk.ingest({"type": "goal", "match_id": "nope", "team": "home-fc"})
    with pytest.raises(FeedError, match="unknown player"):
        desk.ingest({"type": "card", "match_id": "m1", "player": "ghost", "color": "red", "t_ms": 0})
    # failed card event must not advance the match clock
    assert desk.matches["m1"].last_t_ms == 0


def test_cards_monotone():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    desk.ingest({"type": "card", "match_id": "m1", "player": "p1", "color": "yellow", "t_ms": 10})
    desk.ingest({"type": "card", "match_id": "m1", "player": "p1", "color": "red", "t_ms": 20})
    player = desk.matches["m1"].players["p1"]
    assert (player.yellow_cards, player.red_cards) == (1, 1)


# ------------------------------------------------------------- fatigue


def test_fatigue_index_boundaries():
    player = PlayerState(player_id="p", team_id="t", name="P")
    assert player.fatigue_index(12_000) == 0.0
    player.cumulative_distance_m = 12_000
    assert player.fatigue_index(12_000) == 1.0
    player.cumulative_distance_m = 24_000
    assert player.fatigue_index(12_000) == 1.0  # clamped
    player.cumulative_distance_m = 6_000
    assert player.fatigue_index(12_000) == 0.5  # direct ratio oracle


# ------------------------------------------------------------- heatmap


def test_heatmap_single_cell():
    samples = [(0, 0.1, 0.1)] * 4
    hm = heatmap(samples, rows=2, cols=2)
    assert hm.counts == ((4, 0), (0, 0))
    assert hm.normalized == ((1.0, 0.0), (0.0, 0.0))


def test_heatmap_example_cells():
    # brute-force binning oracle from the examples
    samples = [(0, 0.1, 0.1), (1, 0.2, 0.3), (2, 0.9, 0.9)]
    hm = heatmap(samples, rows=2, cols=2)
    assert hm.counts[0][0] == 2
    assert hm.counts[1][1] == 1
    assert hm.normalized[0][0] == 1.0
    assert hm.normalized[1][1] == 0.5


def test_heatmap_clamps_edge_samples():
    hm = heatmap([(0, 1.0, 1.0)], rows=3, cols=4)
    assert hm.counts[2][3] == 1


def test_heatmap_counts_sum_matches_random_samples():
    rng = random.Random(77)
    for _ in range(25):
        n = rng.randrange(0, 200)
        samples = [(i, rng.random(), rng.random()) for i in range(n)]
        rows, cols = rng.randrange(1, 9), rng.randrange(1, 9)
        hm = heatmap(samples, rows, cols)
        assert hm.total == n
        # cell-for-cell brute force
        grid = [[0] * cols for _ in range(rows)]
        for _t, x, y in samples:
            grid[min(int(y * rows), rows - 1)][min(int(x * cols), cols - 1)] += 1
        assert hm.counts == tuple(tuple(r) for r in grid)
        if n:
            assert max(max(row) for row in hm.normalized) == 1.0


# ------------------------------------------------------------- avatars


def test_avatar_badges_and_positions():
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    desk.ingest({"type": "goal", "match_id": "m1", "team": "home-fc", "player": "p1", "t_ms": 10})
    desk.ingest({"type": "card", "match_id": "m1", "player": "p1", "color": "yellow", "t_ms": 20})
    avatars = {a["player_id"]: a for a in desk.avatar_states("m1")}
    assert avatars["p1"]["badges"] == {"goals": 1, "yellow": 1, "red": 0}
    assert avatars["p1"]["team_color_side"] == "home"
    assert avatars["p2"]["team_color_side"] == "away"

    # no samples yet: formation slot fallback (home left half, away right half)
    assert avatars["p1"]["x"] == 0.25
    assert avatars["p2"]["x"] == 0.75


def test_avatar_follows_last_sample():
    rng = random.Random(11)
    desk = SportsDesk()
    desk.ingest(minimal_descriptor())
    last = None
    t = 0
    for _ in range(40):
        t += rng.randrange(1, 50)
        last = (round(rng.random(), 6), round(rng.random(), 6))
        desk.ingest(
            {"type": "position-sample", "match_id": "m1", "player": "p1", "t_ms": t, "x": last[0], "y": last[1]}
        )
    avatar = next(a for a in desk.avatar_states("m1") if a["player_id"] == "p1")
    assert (avatar["x"], avatar["y"]) == last


# ------------------------------------------------------------- feed replay determinism


def test_feed_replay_deterministic(derby_feed_text):
    def run():
        desk = SportsDesk()
        injected = []
        for event in read_feed(derby_feed_text):
            injected.extend(desk.ingest(event))
        match = desk.matches["derby-finale"]
        distances = {p: round(s.cumulative_distance_m, 9) for p, s in match.players.items()}
        return match.score, match.phase, [c.id for c in injected], distances

    assert run() == run()


def test_feed_rejects_malformed_lines():
    with pytest.raises(FeedError, match="malformed JSON"):
        list(read_feed('{"type": "kick-off"\nbroken'))
    with pytest.raises(FeedError, match="must be an object"):
        list(read_feed("[1,2,3]"))


def test_field_spec_validation():
    with pytest.raises(ValueError):
        FieldSpec(length_m=0)
    spec = FieldSpec()
    assert spec.segment_length_m(0, 0, 1, 0) == pytest.approx(105.0)
    assert spec.segment_length_m(0, 0, 0, 1) == pytest.approx(68.0)


def test_heatmap_normalized_empty():
    hm = Heatmap(rows=2, cols=2, counts=((0, 0), (0, 0)))
    assert hm.normalized == ((0.0, 0.0), (0.0, 0.0))


def test_recent_form_trimmed_to_last_n():
    desk = SportsDesk(last_n=3)
    desk.add_match(
        {**minimal_descriptor(), "recent_form": {"home-fc": ["W", "L", "D", "W", "W", "L"]}}
    )
    assert desk.matches["m1"].recent_form["home-fc"] == ["W", "W", "L"]
