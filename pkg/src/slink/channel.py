"""Impairment channel and the datagram transport between nodes.

apply_channel is a pure function: the same waveform, config and seed
always produce bit-identical output. Noise power is set relative to the
actual post-gain signal power of each block, so a configured SNR means
the same thing for 20 mV pulse trains and unit-amplitude audio.

The transport moves waveform blocks as UDP datagrams in a fixed
little-endian wire format, reorders by sequence number within a bounded
window, drops duplicates, and reports unrecoverable gaps.
"""

from __future__ import annotations

import functools
import logging
import queue
import socket
import struct
import threading
from dataclasses import dataclass

import numpy as np

from .errors import TransportError
from .waveform import SampledWaveform

log = logging.getLogger(__name__)

WIRE_MAGIC = b"SLNK"
WIRE_VERSION = 1
# magic, version u8, flags u8, stream-id u16, seq u32, rate u32 Hz, count u32
_WIRE_HEADER = struct.Struct("<4sBBHIII")

#: payload ceiling per block; UDP itself tops out slightly below this + header
MAX_PAYLOAD_BYTES = 64 * 1024

_FILTER_TAPS = 101


@dataclass(frozen=True)
class ChannelConfig:
    gain: float = 1.0
    snr_db: float | None = None
    lowpass_cutoff: float | None = None
    dc_offset: float = 0.0
    jammer: tuple[float, float] | None = None  # (frequency Hz, amplitude)
    seed: int = 0

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError("gain must be positive")
        if self.lowpass_cutoff is not None and not self.lowpass_cutoff > 0:
            raise ValueError("lowpass cutoff must be positive")
        if self.jammer is not None and len(self.jammer) != 2:
            raise ValueError("jammer must be (frequency, amplitude)")


@functools.lru_cache(maxsize=32)
def _lowpass_taps(cutoff: float, rate: float, numtaps: int = _FILTER_TAPS) -> np.ndarray:
    """Hamming-windowed sinc, unity DC gain, linear phase."""
    n = np.arange(numtaps) - (numtaps - 1) / 2
    taps = 2 * cutoff / rate * np.sinc(2 * cutoff / rate * n)
    taps *= np.hamming(numtaps)
    return taps / taps.sum()


def apply_channel(w: SampledWaveform, cfg: ChannelConfig) -> SampledWaveform:
    """Impair one block: gain, additive noise, band limiting, jammer, offset.

    Noise is injected ahead of the low-pass stage, which models the
    receiving front end band-limiting everything that arrived over the
    air. The jammer tone and DC offset are added after it. The symmetric
    FIR is applied with "same" alignment, so net group delay is zero.
    """
    if len(w) == 0:
        raise ValueError("cannot apply a channel to an empty waveform")
    if cfg.lowpass_cutoff is not None and not cfg.lowpass_cutoff < w.rate / 2:
        raise ValueError("lowpass cutoff must be below the Nyquist rate")
    y = cfg.gain * w.samples
    if cfg.snr_db is not None:
        p_signal = float(np.mean(y**2))
        if p_signal > 0:
            p_noise = p_signal / 10 ** (cfg.snr_db / 10)
            rng = np.random.default_rng(cfg.seed)
            y = y + rng.normal(0.0, np.sqrt(p_noise), y.size)
    if cfg.lowpass_cutoff is not None:
        y = np.convolve(y, _lowpass_taps(cfg.lowpass_cutoff, w.rate), mode="same")
    if cfg.jammer is not None:
        freq, amplitude = cfg.jammer
        t = np.arange(y.size) / w.rate
        y = y + amplitude * np.sin(2 * np.pi * freq * t)
    if cfg.dc_offset:
        y = y + cfg.dc_offset
    return SampledWaveform(y, w.rate)


# --- wire format --------------------------------------------------------


def encode_block(stream_id: int, seq: int, w: SampledWaveform, flags: int = 0) -> bytes:
    payload = w.samples.astype("<f4").tobytes()
    if len(payload) > MAX_PAYLOAD_BYTES:
        raise TransportError(
            f"block payload {len(payload)} bytes exceeds {MAX_PAYLOAD_BYTES}"
        )
    header = _WIRE_HEADER.pack(
        WIRE_MAGIC, WIRE_VERSION, flags, stream_id, seq, int(round(w.rate)), len(w)
    )
    return header + payload


def decode_block(data: bytes) -> tuple[int, int, SampledWaveform]:
    if len(data) < _WIRE_HEADER.size:
        raise TransportError("datagram shorter than the wire header")
    magic, version, _flags, stream_id, seq, rate, count = _WIRE_HEADER.unpack_from(data)
    if magic != WIRE_MAGIC:
        raise TransportError(f"bad wire magic {magic!r}")
    if version != WIRE_VERSION:
        raise TransportError(f"unsupported wire version {version}")
    payload = data[_WIRE_HEADER.size:]
    if len(payload) != 4 * count:
        raise TransportError("sample count disagrees with payload length")
    samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return stream_id, seq, SampledWaveform(samples, float(rate))


# --- reordering receiver -------------------------------------------------


@dataclass(frozen=True)
class TransportEvent:
    """Either an in-order block or a gap notification for lost sequence numbers."""

    kind: str  # "block" | "gap"
    stream_id: int
    seq: int                      # block seq, or first missing seq for a gap
    waveform: SampledWaveform | None = None
    missing: int = 0              # gap length


class ReorderBuffer:
    """Per-stream sequencing: emits blocks in order, bounded by a window."""

    def __init__(self, stream_id: int, window: int = 64):
        self.stream_id = stream_id
        self.window = window
        self.next_seq = 0
        self.pending: dict[int, SampledWaveform] = {}

    def push(self, seq: int, w: SampledWaveform) -> list[TransportEvent]:
        if seq < self.next_seq or seq in self.pending:
            return []  # duplicate
        self.pending[seq] = w
        out: list[TransportEvent] = []
        while self.pending:
            if self.next_seq in self.pending:
                out.append(
                    TransportEvent(
                        "block",
                        self.stream_id,
                        self.next_seq,
                        self.pending.pop(self.next_seq),
                    )
                )
                self.next_seq += 1
                continue
            oldest = min(self.pending)
            if oldest - self.next_seq > self.window or len(self.pending) > self.window:
                # Give up on the missing range and move on.
                out.append(
                    TransportEvent(
                        "gap", self.stream_id, self.next_seq,
                        missing=oldest - self.next_seq,
                    )
                )
                self.next_seq = oldest
                continue
            break
        return out


class DatagramTransport:
    """UDP block transport with per-stream reorder buffers.

    Delivery happens either through the on_event callback (invoked from
    the receive thread) or by polling recv(). Consumers never observe
    out-of-order sequence numbers within a stream.
    """

    def __init__(
        self,
        listen: tuple[str, int],
        peer: tuple[str, int],
        *,
        window: int = 64,
        on_event=None,
    ):
        self.peer = peer
        self.on_event = on_event
        self.window = window
        self._streams: dict[int, ReorderBuffer] = {}
        self._events: queue.Queue[TransportEvent] = queue.Queue()
        self._running = False
        self._thread: threading.Thread | None = None
        try:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            self._sock.bind(listen)
        except OSError as exc:
            raise TransportError(f"cannot bind {listen[0]}:{listen[1]}: {exc}") from exc
        self._sock.settimeout(0.2)

    @property
    def local_address(self) -> tuple[str, int]:
        return self._sock.getsockname()

    def start(self) -> None:
        if self._running:
            return
        self._running = True
        self._thread = threading.Thread(target=self._recv_loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._running = False
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        self._sock.close()

    def send_block(self, stream_id: int, seq: int, w: SampledWaveform) -> None:
        data = encode_block(stream_id, seq, w)
        try:
            self._sock.sendto(data, self.peer)
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def recv(self, timeout: float | None = None) -> TransportEvent | None:
        try:
            return self._events.get(timeout=timeout)
        except queue.Empty:
            return None

    def _recv_loop(self) -> None:
        while self._running:
            try:
                data, _addr = self._sock.recvfrom(65536)
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                stream_id, seq, w = decode_block(data)
            except TransportError as exc:
                log.warning("dropping undecodable datagram: %s", exc)
                continue
            buf = self._streams.get(stream_id)
            if buf is None:
                buf = self._streams[stream_id] = ReorderBuffer(stream_id, self.window)
            for event in buf.push(seq, w):
                if self.on_event is not None:
                    self.on_event(event)
                else:
                    self._events.put(event)
