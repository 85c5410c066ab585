"""The runnable node: pipelines, worker loop, UI events, chat log.

One node owns one address, one UDP transport to its peer, and one link
state machine. Handshake frames ride the pulse path (optionally through
FSK or as spread chips, per the configured profile); chat text rides the
tone path at audio rate. Each outbound block passes through the
impairment channel before it is sent, so the wire carries what a
receiver would actually see.

Everything protocol-visible happens on a single worker thread fed by an
event queue (transport deliveries, UI commands, timer ticks), which
keeps the state machine single-writer. UI event fan-out is synchronous
per subscriber and preserves ordering.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import queue
import threading
import time
from dataclasses import dataclass, field

from .channel import ChannelConfig, DatagramTransport, TransportEvent, apply_channel
from .dsss import LfsrSpec, despread, generate_m_sequence, spread
from .dtmf import SymbolTiming, ToneTable, decode_message, dtmf_encode
from .errors import ConfigError, FrameError, LinkError, SlinkError
from .frames import HandshakeFrame, check_address, decode_frame, encode_frame
from .fsk import FskParams, fsk_demodulate, fsk_modulate
from .link import (
    DEFAULT_RETRIES,
    DEFAULT_TIMEOUT,
    Established,
    Failed,
    LinkMachine,
    MediaState,
    state_name,
)
from .pulsecode import PulseParams, decode_pulses, encode_bits_to_pulses
from .waveform import SampledWaveform

log = logging.getLogger(__name__)

STREAM_FRAMES = 1
STREAM_CHAT = 2
STREAM_VOICE = 3

PROFILES = ("baseband", "fsk", "dsss")

_TICK = 0.02
_VOICE_MARKER_PERIOD = 0.2


def parse_endpoint(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"endpoint must be host:port, got {text!r}")
    return host, int(port)


@dataclass
class NodeConfig:
    address: int
    listen: str = "127.0.0.1:9101"
    peer: str = "127.0.0.1:9102"
    ui: str = "127.0.0.1:8800"
    profile: str = "baseband"
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    log_path: str | None = None
    retries: int = DEFAULT_RETRIES
    timeout: float = DEFAULT_TIMEOUT
    pulse_rate: float = 1_000_000.0
    audio_rate: float = 8_000.0
    chip_rate: float = 100_000.0
    pn: LfsrSpec = field(default_factory=LfsrSpec)
    tone_rows: tuple[float, ...] | None = None
    tone_cols: tuple[float, ...] | None = None

    def __post_init__(self):
        try:
            check_address(self.address, "node address")
        except FrameError as exc:
            raise ConfigError(str(exc)) from exc
        if self.profile not in PROFILES:
            raise ConfigError(f"profile must be one of {PROFILES}, got {self.profile!r}")
        parse_endpoint(self.listen)
        parse_endpoint(self.peer)
        parse_endpoint(self.ui)
        if self.retries < 0 or self.timeout <= 0:
            raise ConfigError("retries must be >= 0 and timeout positive")

    def tone_table(self) -> ToneTable:
        kwargs = {}
        if self.tone_rows is not None:
            kwargs["rows"] = tuple(self.tone_rows)
        if self.tone_cols is not None:
            kwargs["cols"] = tuple(self.tone_cols)
        return ToneTable(**kwargs)

    @classmethod
    def from_dict(cls, raw: dict) -> "NodeConfig":
        raw = dict(raw)
        channel = raw.pop("channel", {})
        if isinstance(channel, dict):
            jammer = channel.get("jammer")
            if jammer is not None:
                channel["jammer"] = tuple(jammer)
            try:
                channel = ChannelConfig(**channel)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad channel config: {exc}") from exc
        pn = raw.pop("pn", None)
        if isinstance(pn, dict):
            pn = LfsrSpec(degree=pn["degree"], taps=tuple(pn["taps"]), seed=pn["seed"])
        for key in ("tone_rows", "tone_cols"):
            if raw.get(key) is not None:
                raw[key] = tuple(raw[key])
        try:
            return cls(
                channel=channel,
                **({"pn": pn} if pn is not None else {}),
                **raw,
            )
        except TypeError as exc:
            raise ConfigError(f"bad node config: {exc}") from exc

    @classmethod
    def from_file(cls, path: str) -> "NodeConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)


# --- chat log -------------------------------------------------------------


def chatlog_append(fh, record: dict) -> None:
    fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    fh.flush()


def chatlog_read(path: str) -> tuple[list[dict], bool]:
    """All complete records plus a flag for a truncated final line."""
    records: list[dict] = []
    truncated = False
    try:
        with open(path) as fh:
            content = fh.read()
    except FileNotFoundError:
        return records, truncated
    for line in content.splitlines(keepends=True):
        if not line.endswith("\n"):
            truncated = True
            break
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            truncated = True
            break
    return records, truncated


# --- runtime ---------------------------------------------------------------


class Subscription:
    def __init__(self, owner: "NodeRuntime", callback):
        self._owner = owner
        self.callback = callback

    def close(self) -> None:
        self._owner._unsubscribe(self)


class NodeRuntime:
    """Owns the transport, the link machine and the UI event stream."""

    def __init__(self, cfg: NodeConfig):
        self.cfg = cfg
        self.table = cfg.tone_table()
        self.timing = SymbolTiming()
        self.pulse_params = PulseParams()
        self.fsk_params = FskParams(rate=cfg.pulse_rate)
        self.pn = generate_m_sequence(cfg.pn) if cfg.profile == "dsss" else None
        self.machine = LinkMachine(
            cfg.address, retries=cfg.retries, timeout=cfg.timeout
        )
        self.transcript: list[dict] = []
        self._events: queue.Queue = queue.Queue()
        self._subscribers: list[Subscription] = []
        self._lock = threading.Lock()
        self._event_id = 0
        self._tx_seq = {STREAM_FRAMES: 0, STREAM_CHAT: 0, STREAM_VOICE: 0}
        self._send_counter = 0
        self._last_voice_marker = 0.0
        self._worker: threading.Thread | None = None
        self._running = False
        self._transport: DatagramTransport | None = None
        self._chatlog = None

    # -- lifecycle --

    def start(self) -> None:
        if self._running:
            return
        self._transport = DatagramTransport(
            parse_endpoint(self.cfg.listen),
            parse_endpoint(self.cfg.peer),
            on_event=lambda ev: self._events.put(("transport", ev)),
        )
        if self.cfg.log_path:
            try:
                self._chatlog = open(self.cfg.log_path, "a")
            except OSError as exc:
                log.error("chat log unavailable (%s); continuing without", exc)
                self._chatlog = None
        self._running = True
        self._transport.start()
        self._worker = threading.Thread(target=self._run, daemon=True)
        self._worker.start()
        log.info(
            "node %d up: listen=%s peer=%s profile=%s",
            self.cfg.address, self.cfg.listen, self.cfg.peer, self.cfg.profile,
        )

    def stop(self) -> None:
        if not self._running:
            return
        self._running = False
        self._events.put(("shutdown", None))
        if self._worker is not None:
            self._worker.join(timeout=2.0)
            self._worker = None
        if self._transport is not None:
            self._transport.stop()
            self._transport = None
        self._log_record({"ts": time.time(), "event": "session_end"})
        if self._chatlog is not None:
            self._chatlog.close()
            self._chatlog = None

    # -- UI surface --

    def subscribe(self, callback) -> Subscription:
        sub = Subscription(self, callback)
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def _unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "kind": "status",
                "id": self._event_id,
                "snapshot": True,
                "address": self.cfg.address,
                "profile": self.cfg.profile,
                "state": state_name(self.machine.state),
                "peer": self.machine.peer,
                "media": self.machine.media.value,
            }

    def connect(self, dst: int) -> None:
        self._events.put(("connect", dst))

    def send_text(self, text: str) -> None:
        self._events.put(("send_text", text))

    def request_voice(self) -> None:
        self._events.put(("voice", None))

    def request_data(self) -> None:
        self._events.put(("data", None))

    def release_media(self) -> None:
        self._events.put(("release", None))

    # -- events --

    def _emit(self, kind: str, **payload) -> dict:
        with self._lock:
            self._event_id += 1
            event = {"id": self._event_id, "kind": kind, "ts": time.time(), **payload}
            subscribers = list(self._subscribers)
        for sub in subscribers:
            try:
                sub.callback(event)
            except Exception:
                log.exception("event subscriber failed; dropping it")
                self._unsubscribe(sub)
        return event

    def _emit_error(self, reason: str) -> None:
        log.warning("node %d: %s", self.cfg.address, reason)
        self._emit("error", reason=reason)

    def _log_record(self, record: dict) -> None:
        if self._chatlog is None:
            return
        try:
            chatlog_append(self._chatlog, record)
        except OSError as exc:
            log.error("chat log write failed: %s", exc)

    # -- signal pipelines --

    def _next_channel(self, stream_id: int) -> ChannelConfig:
        self._send_counter += 1
        derived = (
            self.cfg.channel.seed * 2654435761
            + stream_id * 65537
            + self._send_counter
        ) % (1 << 63)
        return dataclasses.replace(self.cfg.channel, seed=derived)

    def _frame_to_waveform(self, frame: HandshakeFrame) -> SampledWaveform:
        bits = encode_frame(frame)
        if self.cfg.profile == "dsss":
            return SampledWaveform(spread(bits, self.pn), self.cfg.chip_rate)
        pulses = encode_bits_to_pulses(
            bits, self.pulse_params, self.cfg.pulse_rate, terminate=True
        )
        if self.cfg.profile == "fsk":
            return fsk_modulate(pulses, self.fsk_params)
        return pulses

    def _waveform_to_frame(self, w: SampledWaveform) -> HandshakeFrame:
        if self.cfg.profile == "dsss":
            bits = despread(w.samples, self.pn, 0).bits
        else:
            if self.cfg.profile == "fsk":
                w = fsk_demodulate(w, self.fsk_params)
            bits = decode_pulses(w, self.pulse_params)
        return decode_frame(bits)

    def _send_block(self, stream_id: int, w: SampledWaveform) -> None:
        cfg = self._next_channel(stream_id)
        if cfg.lowpass_cutoff is not None and cfg.lowpass_cutoff >= w.rate / 2:
            # The front-end band limit sits above this stream's Nyquist
            # rate, so it constrains nothing: skip it.
            cfg = dataclasses.replace(cfg, lowpass_cutoff=None)
        impaired = apply_channel(w, cfg)
        seq = self._tx_seq[stream_id]
        self._tx_seq[stream_id] = seq + 1
        self._transport.send_block(stream_id, seq, impaired)

    def _send_frame(self, frame: HandshakeFrame) -> None:
        self._send_block(STREAM_FRAMES, self._frame_to_waveform(frame))

    # -- worker --

    def _run(self) -> None:
        while self._running:
            try:
                item = self._events.get(timeout=_TICK)
            except queue.Empty:
                item = None
            if item is not None:
                kind, payload = item
                if kind == "shutdown":
                    break
                try:
                    self._dispatch(kind, payload)
                except SlinkError as exc:
                    self._emit_error(str(exc))
                except Exception:
                    log.exception("worker failure handling %s", kind)
            self._poll_timers()

    def _dispatch(self, kind: str, payload) -> None:
        if kind == "transport":
            self._on_transport(payload)
        elif kind == "connect":
            self._on_connect(payload)
        elif kind == "send_text":
            self._on_send_text(payload)
        elif kind == "voice":
            self._on_media_request("voice")
        elif kind == "data":
            self._on_media_request("data")
        elif kind == "release":
            before = self.machine.media
            self.machine.release_media()
            if before is not self.machine.media:
                self._emit("status", media=self.machine.media.value, decision="released")

    def _poll_timers(self) -> None:
        before = self.machine.state
        retransmit = self.machine.poll_timeout()
        if retransmit is not None:
            self._send_frame(retransmit)
        if type(self.machine.state) is not type(before):
            self._emit_state_change(before)
        if (
            self.machine.media is MediaState.VOICE
            and self.machine.established
            and time.monotonic() - self._last_voice_marker >= _VOICE_MARKER_PERIOD
        ):
            self._last_voice_marker = time.monotonic()
            marker = SampledWaveform([1.0] * 16, self.cfg.audio_rate)
            self._send_block(STREAM_VOICE, marker)

    def _emit_state_change(self, before) -> None:
        self._emit(
            "handshake",
            from_state=state_name(before),
            to_state=state_name(self.machine.state),
            peer=self.machine.peer,
        )
        if isinstance(self.machine.state, Established):
            self._log_record(
                {"ts": time.time(), "event": "established", "peer": self.machine.peer}
            )
        elif isinstance(self.machine.state, Failed):
            self._log_record(
                {"ts": time.time(), "event": "failed", "reason": self.machine.state.reason}
            )

    def _on_connect(self, dst) -> None:
        if dst == self.cfg.address:
            self._emit_error("self-connection")
            return
        try:
            check_address(dst, "destination address")
        except FrameError as exc:
            self._emit_error(str(exc))
            return
        before = self.machine.state
        try:
            request = self.machine.connect(dst)
        except LinkError as exc:
            self._emit_error(str(exc))
            return
        self._send_frame(request)
        self._emit_state_change(before)

    def _on_send_text(self, text: str) -> None:
        if not self.machine.established:
            self._emit_error("not established")
            return
        text = text.upper()
        bad = [c for c in text if c not in self.table.charset]
        if bad:
            self._emit_error(f"unsupported characters: {bad}")
            return
        if not text:
            return
        decision = self.machine.request_media("data")
        self._emit("status", media=self.machine.media.value, decision=decision)
        for char in text:
            wave = dtmf_encode(char, self.table, self.timing, self.cfg.audio_rate)
            self._send_block(STREAM_CHAT, wave)
            event = self._emit("tx_char", char=char)
            self.transcript.append(
                {"dir": "tx", "char": char, "id": event["id"], "ts": event["ts"]}
            )
            self._log_record({"ts": event["ts"], "dir": "tx", "char": char})

    def _on_media_request(self, kind: str) -> None:
        if not self.machine.established:
            self._emit_error("not established")
            return
        decision = self.machine.request_media(kind)
        self._emit("status", media=self.machine.media.value, decision=decision)

    def _on_transport(self, event: TransportEvent) -> None:
        if event.kind == "gap":
            self._emit_error(
                f"lost {event.missing} block(s) on stream {event.stream_id} "
                f"from seq {event.seq}"
            )
            return
        if event.stream_id == STREAM_FRAMES:
            self._on_frame_block(event.waveform)
        elif event.stream_id == STREAM_CHAT:
            self._on_chat_block(event.waveform)
        elif event.stream_id == STREAM_VOICE:
            self._emit("status", voice_marker=True)
        else:
            log.warning("block on unknown stream %d dropped", event.stream_id)

    def _on_frame_block(self, w: SampledWaveform) -> None:
        try:
            frame = self._waveform_to_frame(w)
        except SlinkError as exc:
            self._emit_error(f"frame decode failed: {exc}")
            return
        before = self.machine.state
        response = self.machine.handle_frame(frame)
        if response is not None:
            self._send_frame(response)
        if type(self.machine.state) is not type(before):
            self._emit_state_change(before)

    def _on_chat_block(self, w: SampledWaveform) -> None:
        for char in decode_message(w, self.table):
            event = self._emit("rx_char", char=char)
            self.transcript.append(
                {"dir": "rx", "char": char, "id": event["id"], "ts": event["ts"]}
            )
            self._log_record({"ts": event["ts"], "dir": "rx", "char": char})
