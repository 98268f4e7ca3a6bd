"""Per-surface attention mediation.

Each secondary surface runs a small state machine: content and user input
drive its mode (hibernated < ambient < glance < focus), and the mode maps to
a brightness level. Idle surfaces hibernate; an activation gesture or voice
command wakes them to at least glance. An optional one-step brightness pulse
marks escalations so a viewer notices newly available content.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

from .model import Activation, AttentionLevel, Cue


class SurfaceMode(IntEnum):
    HIBERNATED = 0
    AMBIENT = 1
    GLANCE = 2
    FOCUS = 3

    @property
    def wire(self) -> str:
        return self.name.lower()


INPUT_KINDS = ("hand-gesture", "voice-command", "touch", "remote")

# Input kinds able to carry an activate/deactivate intent.
ACTIVATION_KINDS = ("hand-gesture", "voice-command")


@dataclass(frozen=True)
class AttentionPolicy:
    """Brightness per mode plus hibernation timing.

    Brightness must be monotone in mode order. Defaults are configuration,
    not gospel: ambient 0.3, glance 0.6, focus 0.9, hibernate after 30 s.
    """

    brightness_ambient: float = 0.3
    brightness_glance: float = 0.6
    brightness_focus: float = 0.9
    hibernate_after_ms: int = 30_000
    transition_pulse: bool = True
    pulse_boost: float = 0.2

    def __post_init__(self) -> None:
        if not (0 < self.brightness_ambient <= self.brightness_glance <= self.brightness_focus <= 1):
            raise ValueError("brightness must satisfy 0 < ambient <= glance <= focus <= 1")
        if self.hibernate_after_ms <= 0:
            raise ValueError("hibernate_after_ms must be positive")

    def brightness_for(self, mode: SurfaceMode) -> float:
        return {
            SurfaceMode.HIBERNATED: 0.0,
            SurfaceMode.AMBIENT: self.brightness_ambient,
            SurfaceMode.GLANCE: self.brightness_glance,
            SurfaceMode.FOCUS: self.brightness_focus,
        }[mode]


@dataclass(frozen=True)
class InputEvent:
    kind: str  # one of INPUT_KINDS
    action: str | None = None  # "activate" | "deactivate" | None


@dataclass(frozen=True)
class SurfaceAttentionState:
    display_id: str
    mode: SurfaceMode = SurfaceMode.HIBERNATED
    brightness: float = 0.0
    last_input_at: int = 0
    on_demand_active: bool = False
    pulsing: bool = False


def on_input(state: SurfaceAttentionState, event: InputEvent, now_ms: int) -> SurfaceAttentionState:
    """Register user input on this surface.

    Activation gestures/voice turn on-demand content on and wake hibernated
    surfaces to glance immediately; a deactivation turns it off. Everything
    else just refreshes the idle timer.
    """
    state = replace(state, last_input_at=now_ms)
    if event.kind in ACTIVATION_KINDS and event.action == "activate":
        mode = state.mode if state.mode > SurfaceMode.GLANCE else SurfaceMode.GLANCE
        return replace(state, on_demand_active=True, mode=mode)
    if event.action == "deactivate":
        return replace(state, on_demand_active=False)
    return state


def derive_mode(
    active_cues: list[Cue],
    on_demand_active: bool,
    idle_ms: int,
    policy: AttentionPolicy,
) -> SurfaceMode:
    """Mode for a surface given its visible cues and interaction recency.

    Focus content always wins; an activated surface stays at glance until it
    idles out; auto content keeps the surface ambient; otherwise it sleeps.
    """
    if idle_ms < 0:
        raise ValueError("idle_ms must be >= 0")
    if any(c.attention is AttentionLevel.FOCUS for c in active_cues):
        return SurfaceMode.FOCUS
    if on_demand_active and idle_ms < policy.hibernate_after_ms:
        return SurfaceMode.GLANCE
    if any(c.activation is Activation.AUTO for c in active_cues):
        return SurfaceMode.AMBIENT
    return SurfaceMode.HIBERNATED


def step(
    state: SurfaceAttentionState,
    now_ms: int,
    active_cues: list[Cue],
    policy: AttentionPolicy,
) -> SurfaceAttentionState:
    """One evaluation step: recompute mode and settle or pulse brightness.

    The escalation pulse overshoots for exactly one step and settles on the
    next, so settled brightness is a pure function of mode. Hibernating
    clears the on-demand flag.
    """
    if now_ms < state.last_input_at:
        raise ValueError("now_ms must be >= last_input_at")
    idle_ms = now_ms - state.last_input_at
    mode = derive_mode(active_cues, state.on_demand_active, idle_ms, policy)
    brightness = policy.brightness_for(mode)
    pulsing = False
    if policy.transition_pulse and mode > state.mode:
        brightness = min(1.0, brightness + policy.pulse_boost)
        pulsing = True
    on_demand = state.on_demand_active and mode is not SurfaceMode.HIBERNATED
    return replace(
        state,
        mode=mode,
        brightness=brightness,
        on_demand_active=on_demand,
        pulsing=pulsing,
    )
