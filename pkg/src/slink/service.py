"""HTTP + WebSocket surface for one node.

REST endpoints accept commands and report status; /ws streams every UI
event as one JSON object per message and accepts the same commands as
JSON, so a browser chat client needs nothing but a WebSocket. A client
connecting mid-session first receives a status snapshot, then live
events in id order.
"""

from __future__ import annotations

import asyncio
import json
from typing import Literal, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, Field

from .node import NodeRuntime


class ConnectRequest(BaseModel):
    dst: int = Field(ge=1, le=63)


class SendTextRequest(BaseModel):
    text: str = Field(min_length=1)


class MediaRequest(BaseModel):
    action: Literal["voice", "data", "release"]


class CommandAccepted(BaseModel):
    accepted: bool = True


class StatusResponse(BaseModel):
    address: int
    profile: str
    state: str
    peer: Optional[int]
    media: str
    last_event_id: int


class TranscriptEntry(BaseModel):
    dir: str
    char: str
    id: int
    ts: float


def create_app(runtime: NodeRuntime) -> FastAPI:
    app = FastAPI(title="slink node", version="0.1.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/status", response_model=StatusResponse)
    def status() -> StatusResponse:
        snap = runtime.snapshot()
        return StatusResponse(
            address=snap["address"],
            profile=snap["profile"],
            state=snap["state"],
            peer=snap["peer"],
            media=snap["media"],
            last_event_id=snap["id"],
        )

    @app.get("/transcript", response_model=list[TranscriptEntry])
    def transcript() -> list[dict]:
        return list(runtime.transcript)

    @app.post("/connect", response_model=CommandAccepted)
    def connect(req: ConnectRequest) -> CommandAccepted:
        runtime.connect(req.dst)
        return CommandAccepted()

    @app.post("/send", response_model=CommandAccepted)
    def send(req: SendTextRequest) -> CommandAccepted:
        runtime.send_text(req.text)
        return CommandAccepted()

    @app.post("/media", response_model=CommandAccepted)
    def media(req: MediaRequest) -> CommandAccepted:
        if req.action == "voice":
            runtime.request_voice()
        elif req.action == "data":
            runtime.request_data()
        else:
            runtime.release_media()
        return CommandAccepted()

    @app.websocket("/ws")
    async def websocket(ws: WebSocket) -> None:
        await ws.accept()
        loop = asyncio.get_running_loop()
        events: asyncio.Queue = asyncio.Queue()
        sub = runtime.subscribe(
            lambda ev: loop.call_soon_threadsafe(events.put_nowait, ev)
        )
        await ws.send_text(json.dumps(runtime.snapshot()))

        async def pump_events() -> None:
            while True:
                event = await events.get()
                await ws.send_text(json.dumps(event))

        async def pump_commands() -> None:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    cmd = msg.get("cmd")
                except (json.JSONDecodeError, AttributeError):
                    await ws.send_text(
                        json.dumps({"kind": "error", "reason": "unparseable command"})
                    )
                    continue
                if cmd == "connect":
                    runtime.connect(int(msg.get("dst", 0)))
                elif cmd == "send_text":
                    runtime.send_text(str(msg.get("text", "")))
                elif cmd == "request_voice":
                    runtime.request_voice()
                elif cmd == "release_media":
                    runtime.release_media()
                else:
                    await ws.send_text(
                        json.dumps({"kind": "error", "reason": f"unknown command {cmd!r}"})
                    )

        tasks = [
            asyncio.create_task(pump_events()),
            asyncio.create_task(pump_commands()),
        ]
        try:
            done, pending = await asyncio.wait(
                tasks, return_when=asyncio.FIRST_EXCEPTION
            )
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            for task in tasks:
                task.cancel()
            sub.close()

    return app
