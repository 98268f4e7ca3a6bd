"""Seat-aware, occlusion-avoiding panel placement on the table surface.

Panels are axis-aligned rectangles placed on a discrete candidate grid,
as close as possible to the anchor of the owner's seat side. Physical
objects on the table are obstacles: panels never overlap them (or each
other), and obstacle changes trigger deterministic re-placement. Panels
with nowhere to go are hidden, not dropped, and reappear when space frees up.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable


class LayoutError(ValueError):
    pass


class NoSpaceError(LayoutError):
    """No feasible grid position for the panel."""


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise LayoutError("rect needs positive width and height")

    @property
    def cx(self) -> float:
        return self.x + self.w / 2

    @property
    def cy(self) -> float:
        return self.y + self.h / 2

    def overlaps(self, other: "Rect") -> bool:
        """True when the open interiors intersect; touching edges is fine."""
        return (
            self.x < other.x + other.w
            and other.x < self.x + self.w
            and self.y < other.y + other.h
            and other.y < self.y + self.h
        )

    def within(self, width: float, height: float) -> bool:
        return 0 <= self.x and 0 <= self.y and self.x + self.w <= width and self.y + self.h <= height

    def to_wire(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


@dataclass(frozen=True)
class Panel:
    id: str
    rect: Rect
    rotation: int = 0  # degrees, quarter turns only
    seat: str = "left"  # owner seat side
    hidden: bool = False

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "rect": self.rect.to_wire(),
            "rotation": self.rotation,
            "seat": self.seat,
            "hidden": self.hidden,
        }


SEAT_SIDES = ("left", "right")


def seat_anchor(width: float, height: float, seat: str) -> tuple[float, float]:
    """Anchor = midpoint of the seat's surface edge."""
    if seat == "left":
        return (0.0, height / 2)
    if seat == "right":
        return (width, height / 2)
    raise LayoutError(f"unknown seat side {seat!r}")


@dataclass(frozen=True)
class SurfaceLayout:
    width: float
    height: float
    grid_step: float = 10.0
    obstacles: tuple[Rect, ...] = ()
    panels: tuple[Panel, ...] = ()

    def visible_panels(self) -> tuple[Panel, ...]:
        return tuple(p for p in self.panels if not p.hidden)

    def panel(self, panel_id: str) -> Panel:
        for panel in self.panels:
            if panel.id == panel_id:
                return panel
        raise LayoutError(f"unknown panel {panel_id!r}")

    def _blockers(self, skip_panel: str | None = None) -> list[Rect]:
        rects = list(self.obstacles)
        rects.extend(
            p.rect for p in self.panels if not p.hidden and p.id != skip_panel
        )
        return rects

    def is_free(self, rect: Rect, skip_panel: str | None = None) -> bool:
        return rect.within(self.width, self.height) and not any(
            rect.overlaps(b) for b in self._blockers(skip_panel)
        )

    def _grid_positions(self, w: float, h: float) -> Iterable[tuple[float, float]]:
        step = self.grid_step
        x = 0.0
        while x + w <= self.width + 1e-9:
            y = 0.0
            while y + h <= self.height + 1e-9:
                yield (x, y)
                y += step
            x += step


def place_panel(
    layout: SurfaceLayout,
    panel_id: str,
    size: tuple[float, float],
    seat: str,
    rotation: int = 0,
) -> SurfaceLayout:
    """Place a new panel at the feasible grid position nearest the seat anchor.

    Candidates are ranked by (squared distance from panel center to anchor,
    y, x); the first non-overlapping one wins, so ties break toward smaller y
    then smaller x. Raises NoSpaceError when nothing fits.
    """
    w, h = size
    if w > layout.width or h > layout.height:
        raise NoSpaceError(f"panel {w}x{h} larger than the surface")
    if any(p.id == panel_id for p in layout.panels):
        raise LayoutError(f"duplicate panel id {panel_id!r}")
    placed = _try_place(layout, panel_id, (w, h), seat, rotation)
    if placed is None:
        raise NoSpaceError(f"no feasible position for panel {panel_id!r}")
    return replace(layout, panels=layout.panels + (placed,))


def _try_place(
    layout: SurfaceLayout,
    panel_id: str,
    size: tuple[float, float],
    seat: str,
    rotation: int,
    skip_panel: str | None = None,
) -> Panel | None:
    w, h = size
    ax, ay = seat_anchor(layout.width, layout.height, seat)
    candidates = sorted(
        layout._grid_positions(w, h),
        key=lambda pos: ((pos[0] + w / 2 - ax) ** 2 + (pos[1] + h / 2 - ay) ** 2, pos[1], pos[0]),
    )
    for x, y in candidates:
        rect = Rect(x, y, w, h)
        if layout.is_free(rect, skip_panel=skip_panel):
            return Panel(id=panel_id, rect=rect, rotation=rotation, seat=seat)
    return None


def _replace_panel(layout: SurfaceLayout, panel: Panel) -> SurfaceLayout:
    return replace(
        layout,
        panels=tuple(panel if p.id == panel.id else p for p in layout.panels),
    )


def _reflow(layout: SurfaceLayout, panel_ids: Iterable[str]) -> SurfaceLayout:
    """Re-place the listed panels (ascending id order); the unplaceable become
    hidden."""
    for panel_id in sorted(panel_ids):
        panel = layout.panel(panel_id)
        w, h = panel.rect.w, panel.rect.h
        hidden_marker = replace(panel, hidden=True)
        layout = _replace_panel(layout, hidden_marker)
        placed = _try_place(layout, panel_id, (w, h), panel.seat, panel.rotation)
        if placed is not None:
            layout = _replace_panel(layout, replace(placed, hidden=False))
    return layout


def add_obstacle(layout: SurfaceLayout, rect: Rect) -> SurfaceLayout:
    """Register a physical object; panels it occludes are re-placed near their
    owner's seat (or hidden when nothing fits)."""
    if not rect.within(layout.width, layout.height):
        raise LayoutError("obstacle outside surface bounds")
    displaced = [p.id for p in layout.visible_panels() if p.rect.overlaps(rect)]
    layout = replace(layout, obstacles=layout.obstacles + (rect,))
    return _reflow(layout, displaced)


def remove_obstacle(layout: SurfaceLayout, rect: Rect) -> SurfaceLayout:
    """Remove a previously added obstacle; hidden panels get another chance,
    in panel-id order."""
    if rect not in layout.obstacles:
        raise LayoutError("obstacle not present")
    remaining = list(layout.obstacles)
    remaining.remove(rect)
    layout = replace(layout, obstacles=tuple(remaining))
    return _reflow(layout, [p.id for p in layout.panels if p.hidden])


def move_panel(layout: SurfaceLayout, panel_id: str, x: float, y: float) -> SurfaceLayout:
    """User drag: clamp into bounds, reject anything that would overlap."""
    panel = layout.panel(panel_id)
    x = min(max(x, 0.0), layout.width - panel.rect.w)
    y = min(max(y, 0.0), layout.height - panel.rect.h)
    rect = Rect(x, y, panel.rect.w, panel.rect.h)
    if not layout.is_free(rect, skip_panel=panel_id):
        raise LayoutError("would-overlap")
    return _replace_panel(layout, replace(panel, rect=rect, hidden=False))


def rotate_panel(layout: SurfaceLayout, panel_id: str, quarter_turns: int) -> SurfaceLayout:
    """Rotate in quarter turns about the panel center; odd turns swap w/h.
    Result is clamped into bounds and rejected if it would overlap."""
    panel = layout.panel(panel_id)
    rotation = (panel.rotation + quarter_turns * 90) % 360
    w, h = panel.rect.w, panel.rect.h
    if quarter_turns % 2 == 1:
        w, h = h, w
    x = min(max(panel.rect.cx - w / 2, 0.0), layout.width - w)
    y = min(max(panel.rect.cy - h / 2, 0.0), layout.height - h)
    rect = Rect(x, y, w, h)
    if not layout.is_free(rect, skip_panel=panel_id):
        raise LayoutError("would-overlap")
    return _replace_panel(layout, replace(panel, rect=rect, rotation=rotation))
