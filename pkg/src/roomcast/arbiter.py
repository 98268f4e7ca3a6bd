"""Controller-token arbitration for shared displays.

A single transferable token grants cast/control privileges over the shared
surfaces. Requests queue FIFO behind the current holder; the holder can pass
the token directly or release it to the next in line. Transitions are pure,
which keeps them cheap to enumerate exhaustively in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


class TokenError(ValueError):
    """Raised when an operation requires holding the token and the caller does not."""


# Command classes for authorization checks.
SHARED_CAST = "shared-display-cast"
SHARED_CONTROL = "shared-display-control"
PERSONAL = "personal"


@dataclass(frozen=True)
class ControlToken:
    holder: str | None = None
    queue: tuple[str, ...] = ()

    def request(self, user: str) -> "ControlToken":
        """Grant immediately when free; otherwise queue (idempotent)."""
        if self.holder is None:
            return ControlToken(holder=user, queue=self.queue)
        if user == self.holder or user in self.queue:
            return self
        return replace(self, queue=self.queue + (user,))

    def pass_to(self, from_user: str, to_user: str) -> "ControlToken":
        if from_user != self.holder:
            raise TokenError(f"{from_user!r} does not hold the token")
        queue = tuple(u for u in self.queue if u != to_user)
        return ControlToken(holder=to_user, queue=queue)

    def release(self, user: str) -> "ControlToken":
        if user != self.holder:
            raise TokenError(f"{user!r} does not hold the token")
        if self.queue:
            return ControlToken(holder=self.queue[0], queue=self.queue[1:])
        return ControlToken()

    def authorize(self, user: str, command_class: str) -> bool:
        """Personal commands are always allowed; shared-display classes only
        for the holder."""
        if command_class == PERSONAL:
            return True
        if command_class in (SHARED_CAST, SHARED_CONTROL):
            return user == self.holder
        raise ValueError(f"unknown command class {command_class!r}")

    def to_wire(self) -> dict:
        return {"holder": self.holder, "queue": list(self.queue)}
