"""Software-defined two-node wireless link simulator.

Physical layer: bits ride pulse-repetition-time coded pulse trains,
optionally FSK-modulated or spread with maximal-length PN codes; chat
text rides an extended 6x6 dual-tone alphabet. Link layer: a 14-bit
request/acknowledge handshake with retries plus data-over-voice media
arbitration. The node daemon glues the pipelines to a UDP block
transport and serves a JSON UI API over HTTP and WebSocket.
"""

from .channel import ChannelConfig, DatagramTransport, apply_channel
from .dsss import LfsrSpec, PnSequence, acquire, despread, generate_m_sequence, spread
from .dtmf import (
    SymbolTiming,
    ToneTable,
    decode_message,
    dtmf_decode_symbol,
    dtmf_encode,
    encode_message,
    match_frequency,
    spectrum_peaks,
)
from .errors import SlinkError
from .frames import HandshakeFrame, ack_transform, decode_frame, encode_frame, validate_ack
from .fsk import FskParams, fsk_demodulate, fsk_modulate
from .link import LinkMachine, MediaState, arbitrate
from .node import NodeConfig, NodeRuntime
from .pulsecode import (
    PulseParams,
    classify_prt,
    decode_pulses,
    encode_bits_to_pulses,
    measure_prt,
    zero_crossing_detect,
)
from .waveform import SampledWaveform, read_fixture, write_fixture

__version__ = "0.1.0"
