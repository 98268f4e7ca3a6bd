"""roomcast: multi-display living-room media orchestration engine."""

__version__ = "0.1.0"
