"""Connection state machine and voice/data arbitration.

Connect-before-communicate: a node may only carry chat text or voice
markers once the two-frame handshake has completed. The initiator
retransmits its request on a timeout until its retry budget runs out;
the responder acknowledges and considers the link up immediately, and
re-acks duplicate requests so a lost acknowledgement heals on the
initiator's next retry.

Media arbitration is an either/or resource: data always wins, voice
only gets the channel when it is idle.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from enum import Enum

from .errors import LinkError
from .frames import HandshakeFrame, ack_transform, validate_ack

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 5
DEFAULT_TIMEOUT = 0.25


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class AwaitingAck:
    request: HandshakeFrame
    retries_left: int
    deadline: float


@dataclass(frozen=True)
class Established:
    peer: int


@dataclass(frozen=True)
class Failed:
    reason: str


LinkState = Idle | AwaitingAck | Established | Failed


class MediaState(str, Enum):
    IDLE = "idle"
    VOICE = "voice"
    DATA = "data"


def state_name(state: LinkState) -> str:
    return type(state).__name__.lower()


def initiate(
    own: int,
    peer: int,
    *,
    now: float,
    retries: int = DEFAULT_RETRIES,
    timeout: float = DEFAULT_TIMEOUT,
    state: LinkState = Idle(),
) -> tuple[AwaitingAck, HandshakeFrame]:
    """Build the connection request and arm the retry timer."""
    if not isinstance(state, Idle):
        raise LinkError(f"cannot initiate while {state_name(state)}")
    if own == peer:
        raise LinkError("cannot connect a node to itself")
    request = HandshakeFrame(src=own, dst=peer, ack=0)
    return AwaitingAck(request=request, retries_left=retries, deadline=now + timeout), request


def on_frame(
    state: LinkState, own: int, frame: HandshakeFrame
) -> tuple[LinkState, HandshakeFrame | None]:
    """Advance the state machine for one received frame.

    Frames addressed elsewhere, unexpected acks and anything arriving in
    Failed are silently discarded (state unchanged, nothing transmitted).
    """
    if frame.dst != own:
        return state, None
    if isinstance(state, Idle) and frame.ack == 0:
        return Established(peer=frame.src), ack_transform(frame)
    if isinstance(state, AwaitingAck) and frame.ack == 1:
        if validate_ack(state.request, frame):
            return Established(peer=state.request.dst), None
        return state, None
    if isinstance(state, Established) and frame.ack == 0 and frame.src == state.peer:
        # Our ack was lost; the peer is retrying. Re-ack, stay up.
        return state, ack_transform(frame)
    return state, None


def on_timeout(
    state: LinkState, *, now: float, timeout: float = DEFAULT_TIMEOUT
) -> tuple[LinkState, HandshakeFrame | None]:
    """Retry or fail an in-flight request whose deadline has passed."""
    if not isinstance(state, AwaitingAck) or now < state.deadline:
        return state, None
    if state.retries_left > 0:
        return (
            AwaitingAck(
                request=state.request,
                retries_left=state.retries_left - 1,
                deadline=now + timeout,
            ),
            state.request,
        )
    return Failed(reason="timeout"), None


def arbitrate(current: MediaState, request: str) -> tuple[MediaState, str]:
    """Single-resource media arbitration.

    Data is granted unconditionally, suppressing active voice; voice is
    granted only from idle. Decisions: "granted", "rejected",
    "voice-suppressed".
    """
    if request == "data":
        if current is MediaState.VOICE:
            return MediaState.DATA, "voice-suppressed"
        return MediaState.DATA, "granted"
    if request == "voice":
        if current is MediaState.IDLE:
            return MediaState.VOICE, "granted"
        return current, "rejected"
    raise ValueError(f"unknown media request {request!r}")


class LinkMachine:
    """Single-owner wrapper: current state, media state, and an event log.

    All transitions must come from one driver (the node's worker loop);
    the pure transition functions above do the actual work.
    """

    def __init__(
        self,
        own: int,
        *,
        retries: int = DEFAULT_RETRIES,
        timeout: float = DEFAULT_TIMEOUT,
        clock=time.monotonic,
    ):
        self.own = own
        self.retries = retries
        self.timeout = timeout
        self.clock = clock
        self.state: LinkState = Idle()
        self.media = MediaState.IDLE
        self.log: list[dict] = []

    def _append(self, record: dict) -> None:
        self.log.append(record)
        # One JSON line per transition, for conformance inspection.
        log.info("link %s", json.dumps(record, separators=(",", ":")))

    def _record(self, before: LinkState, event: str, action: str) -> None:
        self._append(
            {
                "ts": self.clock(),
                "before": state_name(before),
                "event": event,
                "after": state_name(self.state),
                "action": action,
            }
        )

    @property
    def established(self) -> bool:
        return isinstance(self.state, Established)

    @property
    def peer(self) -> int | None:
        return self.state.peer if isinstance(self.state, Established) else None

    def connect(self, peer: int) -> HandshakeFrame:
        before = self.state
        self.state, request = initiate(
            self.own,
            peer,
            now=self.clock(),
            retries=self.retries,
            timeout=self.timeout,
            state=self.state,
        )
        self._record(before, f"connect({peer})", "tx request")
        return request

    def handle_frame(self, frame: HandshakeFrame) -> HandshakeFrame | None:
        before = self.state
        self.state, response = on_frame(self.state, self.own, frame)
        action = "tx ack" if response is not None else "none"
        self._record(before, f"rx {frame.src}->{frame.dst} ack={frame.ack}", action)
        return response

    def poll_timeout(self) -> HandshakeFrame | None:
        before = self.state
        self.state, retransmit = on_timeout(
            self.state, now=self.clock(), timeout=self.timeout
        )
        if self.state != before:
            self._record(
                before, "timeout", "retransmit" if retransmit else "give up"
            )
        return retransmit

    def request_media(self, kind: str) -> str:
        if not self.established:
            raise LinkError("media requests require an established link")
        before = self.media
        self.media, decision = arbitrate(self.media, kind)
        self._append(
            {
                "ts": self.clock(),
                "before": before.value,
                "event": f"media({kind})",
                "after": self.media.value,
                "action": decision,
            }
        )
        return decision

    def release_media(self) -> None:
        self.media = MediaState.IDLE

    def reset(self) -> None:
        """Local teardown; the protocol has no disconnect message."""
        before = self.state
        self.state = Idle()
        self.media = MediaState.IDLE
        self._record(before, "reset", "none")
