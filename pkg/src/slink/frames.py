"""14-bit connection handshake frames.

A connection request is a single 14-bit code transmitted serially,
most significant bit first:

    [start=1][source address, 6 bits MSB first][destination address, 6 bits MSB first][ack]

The responder answers by swapping the two addresses and setting the ack
bit, so the initiator can recognise its own request coming back.
Addresses occupy 1..63; 0 is reserved so an all-zero field reads as a
fault rather than a node.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import FrameError

ADDRESS_BITS = 6
FRAME_BITS = 14
MIN_ADDRESS = 1
MAX_ADDRESS = (1 << ADDRESS_BITS) - 1


def check_address(value: int, label: str = "address") -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise FrameError(f"{label} must be an integer, got {value!r}")
    if not MIN_ADDRESS <= value <= MAX_ADDRESS:
        raise FrameError(f"{label} must be in {MIN_ADDRESS}..{MAX_ADDRESS}, got {value}")
    return value


@dataclass(frozen=True)
class HandshakeFrame:
    """One connection request or acknowledgement."""

    src: int
    dst: int
    ack: int = 0
    start: int = 1

    def __post_init__(self):
        check_address(self.src, "source address")
        check_address(self.dst, "destination address")
        if self.src == self.dst:
            raise FrameError("source and destination addresses must differ")
        if self.ack not in (0, 1):
            raise FrameError(f"ack bit must be 0 or 1, got {self.ack}")
        if self.start != 1:
            raise FrameError("start bit must be 1")


def _address_bits(value: int) -> list[int]:
    return [(value >> shift) & 1 for shift in range(ADDRESS_BITS - 1, -1, -1)]


def encode_frame(frame: HandshakeFrame) -> list[int]:
    """Serialise a frame to its 14 bits in transmission order."""
    return [frame.start, *_address_bits(frame.src), *_address_bits(frame.dst), frame.ack]


def decode_frame(bits) -> HandshakeFrame:
    """Parse 14 bits back into a frame; inverse of encode_frame."""
    bits = list(bits)
    if len(bits) != FRAME_BITS:
        raise FrameError(f"expected {FRAME_BITS} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise FrameError("frame bits must be 0 or 1")
    if bits[0] != 1:
        raise FrameError("start bit not set")
    src = int("".join(map(str, bits[1:7])), 2)
    dst = int("".join(map(str, bits[7:13])), 2)
    return HandshakeFrame(src=src, dst=dst, ack=bits[13])


def ack_transform(request: HandshakeFrame) -> HandshakeFrame:
    """Build the acknowledgement: addresses interchanged, ack bit set."""
    if request.ack != 0:
        raise FrameError("cannot acknowledge a frame that is already an acknowledgement")
    return replace(request, src=request.dst, dst=request.src, ack=1)


def validate_ack(request: HandshakeFrame, response: HandshakeFrame) -> bool:
    """True iff response is exactly the acknowledgement of request."""
    if request.ack != 0:
        raise FrameError("validate_ack expects an unacknowledged request")
    return response == ack_transform(request)
