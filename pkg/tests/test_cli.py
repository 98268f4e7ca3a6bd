from __future__ import annotations

import json
import math
import signal
import socket
import subprocess
import sys

import pytest
from click.testing import CliRunner

from roomcast.cli import main
from roomcast.sports import read_feed

from conftest import FIXTURES


runner = CliRunner()


def invoke(*args):
    return runner.invoke(main, list(args))


# --------------------------------------------------------------- validate


def test_validate_valid_track_exit_zero():
    result = invoke("validate", str(FIXTURES / "tracks" / "movie_night.json"))
    assert result.exit_code == 0, result.output
    assert "ok:" in result.output


def test_validate_bad_window_exit_one_with_message():
    result = invoke("validate", str(FIXTURES / "tracks" / "invalid" / "bad_window.json"))
    assert result.exit_code == 1
    assert "start >= end" in result.output


def test_validate_missing_file_exit_two():
    result = invoke("validate", "/nonexistent/track.json")
    assert result.exit_code == 2


def test_validate_scenario_autodetect():
    result = invoke("validate", str(FIXTURES / "scenarios" / "match_day.json"))
    assert result.exit_code == 0
    assert "scenario" in result.output


def test_validate_track_with_plot_section():
    result = invoke("validate", str(FIXTURES / "tracks" / "saga_e01.json"))
    assert result.exit_code == 0
    assert "plot:" in result.output


def test_validate_invalid_scenario_exit_one(tmp_path):
    bad = tmp_path / "bad_scenario.json"
    bad.write_text(json.dumps({"name": "x", "steps": [{"trigger": {"at_ms": -5}, "actions": []}]}))
    result = invoke("validate", str(bad), "--kind", "scenario")
    assert result.exit_code == 1


# --------------------------------------------------------------- replay


def test_replay_matches_golden_and_is_repeatable(tmp_path):
    scenario = FIXTURES / "scenarios" / "match_day.json"
    golden = FIXTURES / "golden" / "match_day.log.jsonl"
    out1 = tmp_path / "run1.jsonl"
    out2 = tmp_path / "run2.jsonl"
    assert invoke("replay", str(scenario), "--out", str(out1)).exit_code == 0
    assert invoke("replay", str(scenario), "--out", str(out2)).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() == golden.read_bytes()


def test_replay_unwritable_out_exit_two():
    result = invoke(
        "replay", str(FIXTURES / "scenarios" / "empty.json"), "--out", "/nonexistent/dir/out.jsonl"
    )
    assert result.exit_code == 2


def test_replay_empty_scenario_empty_log(tmp_path):
    out = tmp_path / "empty.jsonl"
    result = invoke("replay", str(FIXTURES / "scenarios" / "empty.json"), "--out", str(out))
    assert result.exit_code == 0
    assert out.read_text() == ""


def test_replay_invalid_scenario_exit_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert invoke("replay", str(bad)).exit_code == 1


# --------------------------------------------------------------- export


def test_export_distance_matches_independent_oracle(tmp_path):
    feed = FIXTURES / "feeds" / "derby_finale.jsonl"
    result = invoke("export", str(feed), "--player", "h09", "--distance")
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)

    # independent oracle: sum of Euclidean segment lengths in metres
    samples = []
    for event in read_feed(feed.read_text()):
        if event.get("type") == "position-sample" and event.get("player") == "h09":
            samples.append((event["x"], event["y"]))
    expected = sum(
        math.hypot((x1 - x0) * 105.0, (y1 - y0) * 68.0)
        for (x0, y0), (x1, y1) in zip(samples, samples[1:])
    )
    assert data["distance_m"] == pytest.approx(expected, rel=1e-9)
    assert data["fatigue"] == pytest.approx(min(1.0, expected / 12_000.0))


def test_export_heatmap_counts_and_figure(tmp_path):
    feed = FIXTURES / "feeds" / "derby_finale.jsonl"
    figure = tmp_path / "hm.png"
    result = invoke("export", str(feed), "--player", "h09", "--heatmap", "--figure", str(figure))
    assert result.exit_code == 0, result.output
    rows = [line.split(",") for line in result.output.strip().splitlines() if "," in line]
    total = sum(int(v) for row in rows for v in row)
    assert total == 50  # samples per player in the fixture
    assert len(rows) == 16 and len(rows[0]) == 24
    assert figure.exists() and figure.stat().st_size > 0


def test_export_heatmap_empty_feed_all_zero(tmp_path):
    feed = tmp_path / "empty_feed.jsonl"
    feed.write_text(
        json.dumps(
            {
                "type": "register-match",
                "match_id": "m",
                "home": "h",
                "away": "a",
                "lineups": {"h": [{"player_id": "p1", "name": "P"}], "a": []},
                "t_ms": 0,
            }
        )
        + "\n"
    )
    result = invoke("export", str(feed), "--player", "p1", "--heatmap")
    assert result.exit_code == 0
    values = {v for line in result.output.strip().splitlines() for v in line.split(",")}
    assert values == {"0"}


def test_export_unknown_player_exit_one():
    feed = FIXTURES / "feeds" / "derby_finale.jsonl"
    result = invoke("export", str(feed), "--player", "ghost", "--distance")
    assert result.exit_code == 1


def test_export_distance_figure(tmp_path):
    feed = FIXTURES / "feeds" / "derby_finale.jsonl"
    figure = tmp_path / "dist.png"
    result = invoke("export", str(feed), "--player", "h07", "--distance", "--figure", str(figure))
    assert result.exit_code == 0
    assert figure.exists() and figure.stat().st_size > 0


def test_export_identical_inputs_identical_outputs():
    feed = FIXTURES / "feeds" / "derby_finale.jsonl"
    a = invoke("export", str(feed), "--player", "a10", "--distance")
    b = invoke("export", str(feed), "--player", "a10", "--distance")
    assert a.output == b.output


# --------------------------------------------------------------- serve


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_invalid_config_exit_one(tmp_path):
    result = invoke("serve", str(FIXTURES / "config" / "invalid.json"))
    assert result.exit_code == 1


def test_serve_register_and_clean_shutdown(tmp_path):
    config = tmp_path / "engine.json"
    config.write_text(json.dumps({"preferences_path": str(tmp_path / "prefs.json")}))
    port = free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "roomcast.cli", "serve", str(config), "--port", str(port)],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        import asyncio

        async def roundtrip():
            from roomcast.simdisplay import connect_ws

            for attempt in range(60):
                try:
                    conn, display = await connect_ws(
                        f"ws://127.0.0.1:{port}/ws",
                        {"display_id": "wall", "role": "surround-wall", "capabilities": []},
                    )
                    await conn.close()
                    return display
                except Exception:
                    await asyncio.sleep(0.25)
            raise AssertionError("server never accepted a connection")

        display = asyncio.run(roundtrip())
        assert display.state is not None
        assert display.state["role"] == "surround-wall"
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
    assert proc.returncode == 0  # SIGINT-equivalent: clean shutdown


def test_feed_replay_drives_live_hub(tmp_path):
    config = tmp_path / "engine.json"
    config.write_text(json.dumps({"preferences_path": str(tmp_path / "prefs.json")}))
    port = free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "roomcast.cli", "serve", str(config), "--port", str(port),
         "--clock", "virtual"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        import asyncio

        async def wait_up():
            import httpx

            for _ in range(60):
                try:
                    async with httpx.AsyncClient() as client:
                        response = await client.get(f"http://127.0.0.1:{port}/healthz")
                    if response.status_code == 200:
                        return
                except Exception:
                    await asyncio.sleep(0.25)
            raise AssertionError("server never came up")

        asyncio.run(wait_up())

        replay = subprocess.run(
            [sys.executable, "-m", "roomcast.cli", "feed",
             str(FIXTURES / "feeds" / "derby_finale.jsonl"),
             "--url", f"ws://127.0.0.1:{port}/ws", "--speed", "0"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert replay.returncode == 0, replay.stderr
        assert "0 rejected" in replay.stderr

        async def probe():
            from roomcast.simdisplay import connect_ws

            conn, display = await connect_ws(
                f"ws://127.0.0.1:{port}/ws",
                {"display_id": "tv", "role": "primary-tv", "capabilities": []},
            )
            await conn.close()
            return display.state

        state = asyncio.run(probe())
        (pane,) = state["sports"]["matches"]
        assert pane["match_id"] == "derby-finale"
        assert pane["score"] == [1, 1]
        assert pane["phase"] == "finished"
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
