#!/usr/bin/env python3
"""Generate the committed fixture feed (fixtures/feeds/derby_finale.jsonl).

Deterministic: fixed seed, fixed event plan. Re-running overwrites the file
with identical bytes. The feed registers one match with full lineups, then
interleaves >1000 position samples with key moments (goal, cards, penalty,
free kick, VAR review).
"""

from __future__ import annotations

import json
import random
from pathlib import Path

SEED = 7
MATCH_ID = "derby-finale"
HOME = "harbor-fc"
AWAY = "northside"
SAMPLES_PER_PLAYER = 50  # 22 players -> 1100 samples

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "feeds" / "derby_finale.jsonl"


def main() -> None:
    rng = random.Random(SEED)
    events: list[dict] = []

    lineups = {
        HOME: [{"player_id": f"h{i:02d}", "name": f"Harbor {i}"} for i in range(1, 12)],
        AWAY: [{"player_id": f"a{i:02d}", "name": f"Northside {i}"} for i in range(1, 12)],
    }
    events.append(
        {
            "type": "register-match",
            "match_id": MATCH_ID,
            "home": HOME,
            "away": AWAY,
            "lineups": lineups,
            "recent_form": {HOME: ["W", "W", "D", "L", "W"], AWAY: ["L", "D", "W", "W", "D"]},
            "head_to_head": ["2-1", "0-0", "1-3", "2-2", "1-0"],
            "t_ms": 0,
        }
    )
    events.append({"type": "kick-off", "match_id": MATCH_ID, "t_ms": 0})

    players = [p["player_id"] for p in lineups[HOME]] + [p["player_id"] for p in lineups[AWAY]]
    positions = {p: (rng.random(), rng.random()) for p in players}

    key_moments = {
        700: {"type": "free-kick", "match_id": MATCH_ID},
        1800: {"type": "card", "match_id": MATCH_ID, "player": "a04", "color": "yellow"},
        3100: {
            "type": "goal",
            "match_id": MATCH_ID,
            "team": HOME,
            "player": "h09",
        },
        6000: {"type": "penalty", "match_id": MATCH_ID},
        6050: {
            "type": "var-review",
            "match_id": MATCH_ID,
            "question": "Penalty call correct?",
            "options": ["penalty", "no-penalty", "rewatch"],
        },
        6400: {
            "type": "goal",
            "match_id": MATCH_ID,
            "team": AWAY,
            "player": "a07",
        },
        8800: {"type": "card", "match_id": MATCH_ID, "player": "h03", "color": "red"},
    }

    t_ms = 0
    sample_count = 0
    total_samples = SAMPLES_PER_PLAYER * len(players)
    while sample_count < total_samples:
        t_ms += rng.randint(40, 120) * 4  # 160..480 ms between samples
        tick = t_ms // 100
        if tick in key_moments:
            moment = dict(key_moments.pop(tick))
            moment["t_ms"] = t_ms
            events.append(moment)
        player = players[sample_count % len(players)]
        x, y = positions[player]
        x = min(1.0, max(0.0, x + rng.uniform(-0.02, 0.02)))
        y = min(1.0, max(0.0, y + rng.uniform(-0.02, 0.02)))
        positions[player] = (x, y)
        events.append(
            {
                "type": "position-sample",
                "match_id": MATCH_ID,
                "player": player,
                "t_ms": t_ms,
                "x": round(x, 6),
                "y": round(y, 6),
            }
        )
        sample_count += 1
    for moment in key_moments.values():  # anything the sampling loop jumped over
        moment["t_ms"] = t_ms
        events.append(moment)
    events.append({"type": "final", "match_id": MATCH_ID, "t_ms": t_ms + 1000})

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
    print(f"wrote {len(events)} events ({sample_count} position samples) to {OUT}")


if __name__ == "__main__":
    main()
