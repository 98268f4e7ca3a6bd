"""Network adapter: the hub served over WebSocket.

Each frame is one protocol envelope. All inbound traffic funnels through a
single lock into the synchronous hub, preserving arrival order; outbound
messages are routed by the hub's destination tag (sender, display id, or
broadcast). In real-time mode a background task feeds the hub wall-clock
``clock-sync`` messages; tests and replays drive the clock themselves.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import EngineConfig
from .hub import Hub
from .protocol import TO_ALL, TO_SENDER, encode

logger = logging.getLogger("roomcast.server")

REALTIME_TICK_MS = 100


class HubService:
    """Owns the hub, the inbound ordering lock, and the connection registry."""

    def __init__(self, config: EngineConfig | None = None, realtime: bool = True):
        self.hub = Hub(config=config)
        self.realtime = realtime
        self.lock = asyncio.Lock()
        self.connections: dict[int, WebSocket] = {}
        self.display_routes: dict[str, int] = {}
        self._conn_counter = 0
        self._clock_task: asyncio.Task | None = None

    def attach(self, websocket: WebSocket) -> int:
        self._conn_counter += 1
        self.connections[self._conn_counter] = websocket
        return self._conn_counter

    def detach(self, conn_id: int) -> None:
        self.connections.pop(conn_id, None)
        for display_id, owner in list(self.display_routes.items()):
            if owner == conn_id:
                del self.display_routes[display_id]

    async def process(self, conn_id: int, message: dict[str, Any]) -> None:
        """Run one message through the hub and fan out the results."""
        async with self.lock:
            out = self.hub.handle_message(message)
            if message.get("type") == "register" and any(
                o.message.get("type") == "snapshot" for o in out
            ):
                display_id = message.get("payload", {}).get("display_id")
                if display_id:
                    self.display_routes[display_id] = conn_id
            for outbound in out:
                frame = encode(outbound.message)
                if outbound.to == TO_SENDER:
                    await self._send(conn_id, frame)
                elif outbound.to == TO_ALL:
                    for cid in list(self.connections):
                        await self._send(cid, frame)
                else:
                    owner = self.display_routes.get(outbound.to)
                    if owner is not None:
                        await self._send(owner, frame)

    async def _send(self, conn_id: int, frame: str) -> None:
        websocket = self.connections.get(conn_id)
        if websocket is None:
            return
        try:
            await websocket.send_text(frame)
        except Exception:
            logger.warning("dropping connection %s: send failed", conn_id)
            self.detach(conn_id)

    async def run_clock(self) -> None:
        """Feed the hub wall-derived virtual time (real-time demo mode)."""
        start = time.monotonic()
        while True:
            await asyncio.sleep(REALTIME_TICK_MS / 1000)
            now_ms = int((time.monotonic() - start) * 1000)
            await self.process_clock(now_ms)

    async def process_clock(self, now_ms: int) -> None:
        await self.process(-1, {"type": "clock-sync", "seq": 0, "payload": {"now_ms": now_ms}})


def create_app(
    config: EngineConfig | None = None,
    realtime: bool = True,
    static_dir: str | Path | None = None,
) -> FastAPI:
    service = HubService(config=config, realtime=realtime)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        if service.realtime:
            service._clock_task = asyncio.create_task(service.run_clock())
        yield
        if service._clock_task is not None:
            service._clock_task.cancel()

    app = FastAPI(title="roomcast hub", lifespan=lifespan)
    app.state.service = service

    @app.get("/healthz")
    async def healthz() -> dict[str, Any]:
        return {
            "status": "ok",
            "displays": sorted(service.hub.displays),
            "now_ms": service.hub.now_ms,
        }

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        conn_id = service.attach(websocket)
        logger.info("connection %s open", conn_id)
        try:
            while True:
                frame = await websocket.receive_text()
                try:
                    message = json.loads(frame)
                    if not isinstance(message, dict):
                        raise ValueError("envelope must be an object")
                except ValueError as exc:
                    await websocket.send_text(
                        encode(
                            {
                                "type": "error",
                                "seq": 0,
                                "payload": {"re": None, "reason": f"malformed frame: {exc}"},
                            }
                        )
                    )
                    continue
                await service.process(conn_id, message)
        except WebSocketDisconnect:
            logger.info("connection %s closed", conn_id)
        finally:
            service.detach(conn_id)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(config: EngineConfig | None, port: int, host: str = "127.0.0.1",
          static_dir: str | Path | None = None, realtime: bool = True) -> None:
    """Run the hub server until terminated (blocking)."""
    import uvicorn

    logging.basicConfig(
        level=logging.INFO,
        format='{"ts":"%(asctime)s","level":"%(levelname)s","logger":"%(name)s","msg":"%(message)s"}',
    )
    app = create_app(config=config, realtime=realtime, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
