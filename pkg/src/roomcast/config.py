"""Engine configuration: one JSON file read at startup.

Everything tunable lives here: attention brightness/hibernation, heatmap
grid, fatigue normalization, table placement grid, recent-form window, the
preference-store path, and an optional ambient track to load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .attention import AttentionPolicy


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    attention: AttentionPolicy = field(default_factory=AttentionPolicy)
    heatmap_rows: int = 16
    heatmap_cols: int = 24
    d_max_m: float = 12_000.0
    last_n: int = 5
    grid_step: float = 10.0
    table_width: float = 200.0
    table_height: float = 120.0
    preferences_path: str | None = None
    track_path: str | None = None

    @classmethod
    def from_dict(cls, raw: dict[str, Any], base_dir: Path | None = None) -> "EngineConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
        known = {
            "attention",
            "heatmap_rows",
            "heatmap_cols",
            "d_max_m",
            "last_n",
            "grid_step",
            "table_width",
            "table_height",
            "preferences_path",
            "track_path",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        attention_raw = raw.get("attention", {})
        if not isinstance(attention_raw, dict):
            raise ConfigError("attention must be an object")
        try:
            policy = AttentionPolicy(**attention_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad attention policy: {exc}") from None
        def _resolve(p: str | None) -> str | None:
            if p is None or base_dir is None:
                return p
            return str((base_dir / p).resolve()) if not Path(p).is_absolute() else p
        try:
            return cls(
                attention=policy,
                heatmap_rows=int(raw.get("heatmap_rows", 16)),
                heatmap_cols=int(raw.get("heatmap_cols", 24)),
                d_max_m=float(raw.get("d_max_m", 12_000.0)),
                last_n=int(raw.get("last_n", 5)),
                grid_step=float(raw.get("grid_step", 10.0)),
                table_width=float(raw.get("table_width", 200.0)),
                table_height=float(raw.get("table_height", 120.0)),
                preferences_path=_resolve(raw.get("preferences_path")),
                track_path=_resolve(raw.get("track_path")),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(raw, base_dir=path.parent)
