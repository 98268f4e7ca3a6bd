"""Follow-the-plot data: where every character is at any point in the media.

A plot track declares named map regions, characters grouped into factions,
region-to-region movements with media-time windows, and timed region events.
Positions interpolate linearly between region centroids during a movement and
rest at the latest destination otherwise. All queries are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .model import AmbientTrack, TrackError


class PlotError(ValueError):
    """Raised on malformed plot sections or unknown references."""


@dataclass(frozen=True)
class Region:
    id: str
    name: str
    centroid: tuple[float, float]


@dataclass(frozen=True)
class Character:
    id: str
    name: str
    faction_id: str
    image_ref: str | None = None
    start_region: str | None = None
    first_seen_ms: int = 0


@dataclass(frozen=True)
class Movement:
    character_id: str
    from_region: str
    to_region: str
    t0_ms: int
    t1_ms: int


@dataclass(frozen=True)
class RegionEvent:
    region_id: str
    kind: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class PlotTrack:
    media_id: str
    duration_ms: int
    regions: dict[str, Region]
    characters: dict[str, Character]
    factions: dict[str, str]  # faction id -> display name
    faction_colors: dict[str, int]  # faction id -> color index, unique
    movements: tuple[Movement, ...]
    region_events: tuple[RegionEvent, ...]


def parse_plot(track: AmbientTrack) -> PlotTrack | None:
    """Build the plot view from a track's "plot" section, if present."""
    raw = track.plot_section
    if raw is None:
        return None
    regions: dict[str, Region] = {}
    for region_id, rdef in (raw.get("regions") or {}).items():
        centroid = rdef.get("centroid")
        if (
            not isinstance(centroid, list)
            or len(centroid) != 2
            or not all(isinstance(v, (int, float)) for v in centroid)
        ):
            raise PlotError(f"region {region_id!r}: centroid must be [x, y]")
        regions[region_id] = Region(
            id=region_id,
            name=rdef.get("name", region_id),
            centroid=(float(centroid[0]), float(centroid[1])),
        )

    factions: dict[str, str] = {}
    declared_colors: dict[str, int] = {}
    for faction_id, fdef in (raw.get("factions") or {}).items():
        factions[faction_id] = fdef.get("name", faction_id)
        if "color_index" in fdef:
            declared_colors[faction_id] = int(fdef["color_index"])
    # Stable color assignment: declared indices win, the rest fill in the
    # lowest free indices in faction-id order.
    colors: dict[str, int] = dict(declared_colors)
    if len(set(colors.values())) != len(colors):
        raise PlotError("faction color_index values must be unique")
    used = set(colors.values())
    next_free = 0
    for faction_id in sorted(factions):
        if faction_id in colors:
            continue
        while next_free in used:
            next_free += 1
        colors[faction_id] = next_free
        used.add(next_free)

    characters: dict[str, Character] = {}
    for char_id, cdef in (raw.get("characters") or {}).items():
        faction_id = cdef.get("faction")
        if faction_id not in factions:
            raise PlotError(f"character {char_id!r}: unknown faction {faction_id!r}")
        start_region = cdef.get("start_region")
        if start_region is not None and start_region not in regions:
            raise PlotError(f"character {char_id!r}: unknown start region {start_region!r}")
        characters[char_id] = Character(
            id=char_id,
            name=cdef.get("name", char_id),
            faction_id=faction_id,
            image_ref=cdef.get("image"),
            start_region=start_region,
            first_seen_ms=int(cdef.get("first_seen_ms", 0)),
        )

    movements: list[Movement] = []
    for mdef in raw.get("movements") or []:
        move = Movement(
            character_id=mdef["character"],
            from_region=mdef["from"],
            to_region=mdef["to"],
            t0_ms=int(mdef["t0_ms"]),
            t1_ms=int(mdef["t1_ms"]),
        )
        if move.character_id not in characters:
            raise PlotError(f"movement references unknown character {move.character_id!r}")
        for region_id in (move.from_region, move.to_region):
            if region_id not in regions:
                raise PlotError(f"movement references unknown region {region_id!r}")
        if move.t0_ms >= move.t1_ms:
            raise PlotError(f"movement for {move.character_id!r}: t0 must be < t1")
        movements.append(move)
    movements.sort(key=lambda m: (m.t0_ms, m.character_id))
    by_char: dict[str, list[Movement]] = {}
    for move in movements:
        prior = by_char.setdefault(move.character_id, [])
        if prior and move.t0_ms < prior[-1].t1_ms:
            raise PlotError(f"movements for {move.character_id!r} overlap in time")
        prior.append(move)

    region_events: list[RegionEvent] = []
    for edef in raw.get("region_events") or []:
        event = RegionEvent(
            region_id=edef["region"],
            kind=edef["kind"],
            start_ms=int(edef["start_ms"]),
            end_ms=int(edef["end_ms"]),
        )
        if event.region_id not in regions:
            raise PlotError(f"region event references unknown region {event.region_id!r}")
        if event.start_ms >= event.end_ms:
            raise PlotError(f"region event in {event.region_id!r}: start must be < end")
        region_events.append(event)
    region_events.sort(key=lambda e: (e.start_ms, e.region_id))

    return PlotTrack(
        media_id=track.media_id,
        duration_ms=track.duration_ms,
        regions=regions,
        characters=characters,
        factions=factions,
        faction_colors=colors,
        movements=tuple(movements),
        region_events=tuple(region_events),
    )


def load_plot(track: AmbientTrack) -> PlotTrack:
    plot = parse_plot(track)
    if plot is None:
        raise TrackError("track has no plot section")
    return plot


def character_position(plot: PlotTrack, character_id: str, t_ms: int) -> tuple[float, float]:
    """Position at media time t: linear interpolation while moving, otherwise
    the centroid of the latest destination (or the declared start region)."""
    if character_id not in plot.characters:
        raise PlotError(f"unknown character {character_id!r}")
    if not 0 <= t_ms < plot.duration_ms:
        raise ValueError(f"t_ms {t_ms} outside [0, {plot.duration_ms})")
    character = plot.characters[character_id]
    resting: str | None = character.start_region
    for move in plot.movements:
        if move.character_id != character_id:
            continue
        if move.t0_ms <= t_ms < move.t1_ms:
            x0, y0 = plot.regions[move.from_region].centroid
            x1, y1 = plot.regions[move.to_region].centroid
            u = (t_ms - move.t0_ms) / (move.t1_ms - move.t0_ms)
            return (x0 + u * (x1 - x0), y0 + u * (y1 - y0))
        if move.t1_ms <= t_ms:
            resting = move.to_region
        else:
            break  # movements are time-sorted; the rest lie in the future
    if resting is None:
        raise PlotError(f"character {character_id!r} has no start region before first movement")
    return plot.regions[resting].centroid


def faction_color(plot: PlotTrack, character_id: str) -> int:
    """Stable color index shared by same-faction characters."""
    if character_id not in plot.characters:
        raise PlotError(f"unknown character {character_id!r}")
    return plot.faction_colors[plot.characters[character_id].faction_id]


def active_region_events(plot: PlotTrack, t_ms: int) -> list[dict[str, str]]:
    """Region events whose half-open window contains t."""
    if not 0 <= t_ms < plot.duration_ms:
        raise ValueError(f"t_ms {t_ms} outside [0, {plot.duration_ms})")
    return [
        {"region": e.region_id, "kind": e.kind}
        for e in plot.region_events
        if e.start_ms <= t_ms < e.end_ms
    ]


def map_frame(plot: PlotTrack, t_ms: int) -> dict[str, Any]:
    """Everything the interactive map needs at time t: one marker per visible
    character plus the active region events."""
    markers = []
    for char_id in sorted(plot.characters):
        character = plot.characters[char_id]
        if t_ms < character.first_seen_ms:
            continue
        x, y = character_position(plot, char_id, t_ms)
        markers.append(
            {
                "character": char_id,
                "name": character.name,
                "x": x,
                "y": y,
                "color": faction_color(plot, char_id),
                "image": character.image_ref,
            }
        )
    return {"markers": markers, "events": active_region_events(plot, t_ms)}


def validate_plot(plot: PlotTrack) -> list[str]:
    """Authoring-quality warnings: currently flags movement-chain teleports
    (a movement starting somewhere other than the character's resting region)."""
    warnings: list[str] = []
    resting: dict[str, str | None] = {
        cid: c.start_region for cid, c in plot.characters.items()
    }
    for move in plot.movements:
        prior = resting.get(move.character_id)
        if prior is not None and prior != move.from_region:
            warnings.append(
                f"character {move.character_id!r} teleports from {prior!r} "
                f"to start of movement at {move.from_region!r} (t0={move.t0_ms})"
            )
        resting[move.character_id] = move.to_region
    return warnings
