"""Operator entry points: validate | serve | replay | export.

Exit codes: 0 success, 1 validation failure, 2 runtime error (unreadable
files, bad arguments). Every command is scriptable; identical inputs produce
identical outputs.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .config import ConfigError, EngineConfig
from .model import TrackError, parse_track, validate_track
from .plot import PlotError, parse_plot, validate_plot
from .sports import FeedError, FieldSpec, SportsDesk, read_feed
from .wizard import ScenarioError, load_scenario_file, run_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


@click.group()
def main() -> None:
    """Multi-display ambient media orchestration engine."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)


@main.command()
@click.argument("path", type=str)
@click.option(
    "--kind",
    type=click.Choice(["auto", "track", "scenario"]),
    default="auto",
    help="Document kind; auto-detected from the content by default.",
)
def validate(path: str, kind: str) -> None:
    """Validate a track (with optional plot section) or scenario document."""
    text = _read_text(path)
    if kind == "auto":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            click.echo(f"invalid: malformed JSON: {exc}")
            sys.exit(EXIT_INVALID)
        kind = "scenario" if isinstance(raw, dict) and "steps" in raw else "track"

    if kind == "scenario":
        try:
            scenario = load_scenario_file(path)
        except ScenarioError as exc:
            click.echo(f"invalid scenario: {exc}")
            sys.exit(EXIT_INVALID)
        click.echo(f"ok: scenario {scenario.name!r}, {len(scenario.steps)} steps")
        sys.exit(EXIT_OK)

    try:
        track = parse_track(text)
    except TrackError as exc:
        click.echo(f"invalid track: {exc}")
        sys.exit(EXIT_INVALID)
    issues = validate_track(track)
    for issue in issues:
        where = f" [{issue.cue_id}]" if issue.cue_id else ""
        click.echo(f"{issue.severity}{where}: {issue.message}")
    plot_summary = ""
    if track.plot_section is not None:
        try:
            plot = parse_plot(track)
        except PlotError as exc:
            click.echo(f"invalid plot section: {exc}")
            sys.exit(EXIT_INVALID)
        for warning in validate_plot(plot):
            click.echo(f"warning: {warning}")
        plot_summary = (
            f", plot: {len(plot.characters)} characters / {len(plot.regions)} regions"
        )
    if any(i.severity == "error" for i in issues):
        sys.exit(EXIT_INVALID)
    click.echo(f"ok: track {track.media_id!r}, {len(track.cues)} cues{plot_summary}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("config_path", type=str)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--static-dir", type=str, default=None, help="Serve a UI build from this directory.")
@click.option(
    "--clock",
    type=click.Choice(["realtime", "virtual"]),
    default="realtime",
    show_default=True,
    help="realtime: hub time follows wall time; virtual: clients drive clock-sync themselves.",
)
def serve(config_path: str, port: int, host: str, static_dir: str | None, clock: str) -> None:
    """Run the hub server until terminated."""
    try:
        config = EngineConfig.load(config_path)
    except ConfigError as exc:
        click.echo(f"invalid config: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    from .server import serve as run_server

    try:
        run_server(
            config, port=port, host=host, static_dir=static_dir, realtime=clock == "realtime"
        )
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)


@main.command()
@click.argument("scenario_path", type=str)
@click.option("--out", "out_path", type=str, default=None, help="Write the event log here (default: stdout).")
@click.option("--config", "config_path", type=str, default=None, help="Engine config for the run.")
def replay(scenario_path: str, out_path: str | None, config_path: str | None) -> None:
    """Replay a scenario deterministically and emit its event log."""
    _read_text(scenario_path)
    try:
        scenario = load_scenario_file(scenario_path)
    except ScenarioError as exc:
        click.echo(f"invalid scenario: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    config = None
    if config_path:
        try:
            config = EngineConfig.load(config_path)
        except ConfigError as exc:
            click.echo(f"invalid config: {exc}", err=True)
            sys.exit(EXIT_INVALID)
    log = run_scenario(scenario, config=config)
    text = log.to_text()
    if out_path is None:
        click.echo(text, nl=False)
    else:
        try:
            Path(out_path).write_text(text, encoding="utf-8")
        except OSError as exc:
            click.echo(f"error: cannot write {out_path}: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
        click.echo(f"wrote {len(log.entries)} events to {out_path}", err=True)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("feed_path", type=str)
@click.option("--url", type=str, default="ws://127.0.0.1:8765/ws", show_default=True)
@click.option(
    "--speed",
    type=float,
    default=1.0,
    show_default=True,
    help="Playback speed multiplier over event timestamps; 0 drives the hub's "
    "virtual clock instead of pacing in wall time.",
)
def feed(feed_path: str, url: str, speed: float) -> None:
    """Replay a feed file into a serving hub at configurable speed."""
    if speed < 0:
        click.echo("error: speed must be >= 0", err=True)
        sys.exit(EXIT_RUNTIME)
    text = _read_text(feed_path)
    try:
        events = list(read_feed(text))
    except FeedError as exc:
        click.echo(f"invalid feed: {exc}", err=True)
        sys.exit(EXIT_INVALID)

    import asyncio

    async def run() -> int:
        import websockets

        from .protocol import encode, envelope

        try:
            conn = await websockets.connect(url)
        except OSError as exc:
            click.echo(f"error: cannot connect to {url}: {exc}", err=True)
            return EXIT_RUNTIME
        errors = 0
        seq = 0
        last_t = 0

        async def send(mtype: str, payload: dict) -> None:
            nonlocal seq, errors
            seq += 1
            await conn.send(encode(envelope(mtype, seq, payload)))
            reply = json.loads(await conn.recv())
            while reply.get("type") not in ("ack", "error"):
                reply = json.loads(await conn.recv())
            if reply["type"] == "error":
                errors += 1
                click.echo(f"rejected: {reply['payload']['reason']}", err=True)

        for event in events:
            t_ms = int(event.get("t_ms", last_t))
            if speed > 0 and t_ms > last_t:
                await asyncio.sleep((t_ms - last_t) / 1000 / speed)
            elif speed == 0 and t_ms > last_t:
                await send("clock-sync", {"now_ms": t_ms})
            last_t = max(last_t, t_ms)
            await send("wizard-inject", {"kind": "feed-event", "event": event})
        await conn.close()
        click.echo(f"replayed {len(events)} events ({errors} rejected)", err=True)
        return EXIT_OK if errors == 0 else EXIT_INVALID

    sys.exit(asyncio.run(run()))


@main.command()
@click.argument("feed_path", type=str)
@click.option("--player", "player_id", type=str, required=True)
@click.option("--heatmap", "want_heatmap", is_flag=True, help="Emit the movement heatmap as CSV.")
@click.option("--distance", "want_distance", is_flag=True, help="Emit distance/fatigue as JSON.")
@click.option("--figure", "figure_path", type=str, default=None,
              help="Also render the result as a figure at this path.")
@click.option("--config", "config_path", type=str, default=None)
def export(
    feed_path: str,
    player_id: str,
    want_heatmap: bool,
    want_distance: bool,
    figure_path: str | None,
    config_path: str | None,
) -> None:
    """Replay a feed file and export one player's analytics."""
    if want_heatmap == want_distance:
        click.echo("error: pass exactly one of --heatmap / --distance", err=True)
        sys.exit(EXIT_RUNTIME)
    config = EngineConfig()
    if config_path:
        try:
            config = EngineConfig.load(config_path)
        except ConfigError as exc:
            click.echo(f"invalid config: {exc}", err=True)
            sys.exit(EXIT_INVALID)
    text = _read_text(feed_path)
    desk = SportsDesk(
        field_spec=FieldSpec(),
        d_max_m=config.d_max_m,
        heatmap_rows=config.heatmap_rows,
        heatmap_cols=config.heatmap_cols,
    )
    try:
        for event in read_feed(text):
            desk.ingest(event)
    except FeedError as exc:
        click.echo(f"invalid feed: {exc}", err=True)
        sys.exit(EXIT_INVALID)

    home: tuple[str, str] | None = None
    for match_id, match in desk.matches.items():
        if player_id in match.players:
            home = (match_id, player_id)
            break
    if home is None:
        click.echo(f"unknown player {player_id!r}", err=True)
        sys.exit(EXIT_INVALID)
    match_id, _ = home
    player = desk.matches[match_id].players[player_id]

    if want_heatmap:
        hm = desk.player_heatmap(match_id, player_id)
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        for row in hm.counts:
            writer.writerow(row)
        click.echo(buffer.getvalue(), nl=False)
        if figure_path:
            from .report import render_heatmap

            render_heatmap(hm, figure_path, title=f"{player_id} movement", field_spec=desk.field_spec)
            click.echo(f"wrote figure to {figure_path}", err=True)
    else:
        result = {
            "player_id": player_id,
            "match_id": match_id,
            "distance_m": player.cumulative_distance_m,
            "fatigue": player.fatigue_index(config.d_max_m),
            "samples": len(player.samples),
        }
        click.echo(json.dumps(result, sort_keys=True))
        if figure_path:
            from .report import render_distance_bars

            match = desk.matches[match_id]
            rows = [
                {
                    "player_id": pid,
                    "distance_m": p.cumulative_distance_m,
                    "fatigue": p.fatigue_index(config.d_max_m),
                }
                for pid, p in sorted(match.players.items())
            ]
            render_distance_bars(rows, figure_path, title=f"distance covered: {match_id}")
            click.echo(f"wrote figure to {figure_path}", err=True)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
