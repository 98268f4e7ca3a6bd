"""Figure rendering for exported analytics.

The export command emits machine-readable data (CSV/JSON) on stdout; these
helpers optionally render the same data as figures on disk: a pitch heatmap,
or distance/fatigue bars across a squad.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sports import FieldSpec, Heatmap


def render_heatmap(hm: Heatmap, out_path: str | Path, title: str,
                   field_spec: FieldSpec | None = None) -> Path:
    """Draw the binned movement intensity over a pitch outline."""
    field_spec = field_spec or FieldSpec()
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(8, 8 * field_spec.width_m / field_spec.length_m))
    ax.imshow(
        hm.normalized,
        origin="lower",
        extent=(0, field_spec.length_m, 0, field_spec.width_m),
        aspect="auto",
        cmap="hot",
        vmin=0.0,
        vmax=1.0,
    )
    _draw_pitch(ax, field_spec)
    ax.set_title(title)
    ax.set_xlabel("length (m)")
    ax.set_ylabel("width (m)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def _draw_pitch(ax, field_spec: FieldSpec) -> None:
    length, width = field_spec.length_m, field_spec.width_m
    ax.plot([0, length, length, 0, 0], [0, 0, width, width, 0], color="white", lw=1)
    ax.plot([length / 2, length / 2], [0, width], color="white", lw=1)
    circle = plt.Circle((length / 2, width / 2), 9.15, fill=False, color="white", lw=1)
    ax.add_patch(circle)


def render_distance_bars(rows: list[dict], out_path: str | Path, title: str) -> Path:
    """Bar chart of distance covered with fatigue coloring, one bar per player."""
    out_path = Path(out_path)
    rows = sorted(rows, key=lambda r: -r["distance_m"])
    names = [r["player_id"] for r in rows]
    distances = [r["distance_m"] for r in rows]
    fatigue = [r["fatigue"] for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(rows)), 4.5))
    bars = ax.bar(names, distances, color=plt.cm.RdYlGn_r([f for f in fatigue]))
    ax.bar_label(bars, fmt="%.0f", fontsize=7)
    ax.set_title(title)
    ax.set_ylabel("distance covered (m)")
    ax.tick_params(axis="x", rotation=60)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
