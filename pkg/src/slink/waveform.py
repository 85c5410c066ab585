"""Sampled real-valued waveforms and their binary fixture format.

Every signal stage in the simulator consumes and produces a
SampledWaveform, so encoders, channels and decoders compose freely.
Fixture files let tests pin golden waveforms to disk.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

# Fixture header: magic, version u16, reserved u16, rate u32 Hz, count u32.
FIXTURE_MAGIC = b"SLWV"
FIXTURE_VERSION = 1
_FIXTURE_HEADER = struct.Struct("<4sHHII")


@dataclass
class SampledWaveform:
    """Uniformly sampled signal: amplitudes in volts plus a sample rate in Hz."""

    samples: np.ndarray
    rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not self.rate > 0:
            raise ValueError(f"sample rate must be positive, got {self.rate}")
        if self.samples.size and not np.isfinite(self.samples).all():
            raise ValueError("samples must all be finite")
        self.rate = float(self.rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.rate

    def scaled(self, gain: float) -> "SampledWaveform":
        return SampledWaveform(self.samples * gain, self.rate)


def silence(duration: float, rate: float) -> SampledWaveform:
    return SampledWaveform(np.zeros(int(round(duration * rate))), rate)


def concat(waves: list[SampledWaveform]) -> SampledWaveform:
    if not waves:
        raise ValueError("nothing to concatenate")
    rate = waves[0].rate
    for w in waves:
        if w.rate != rate:
            raise ValueError("sample rates differ")
    return SampledWaveform(np.concatenate([w.samples for w in waves]), rate)


def write_fixture(path, w: SampledWaveform) -> None:
    """Write a waveform as little-endian float32 with a 16-byte header."""
    header = _FIXTURE_HEADER.pack(
        FIXTURE_MAGIC, FIXTURE_VERSION, 0, int(round(w.rate)), len(w)
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(w.samples.astype("<f4").tobytes())


def read_fixture(path) -> SampledWaveform:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _FIXTURE_HEADER.size:
        raise ValueError("fixture file too short for header")
    magic, version, _reserved, rate, count = _FIXTURE_HEADER.unpack_from(raw)
    if magic != FIXTURE_MAGIC:
        raise ValueError(f"bad fixture magic {magic!r}")
    if version != FIXTURE_VERSION:
        raise ValueError(f"unsupported fixture version {version}")
    body = raw[_FIXTURE_HEADER.size:]
    if len(body) != 4 * count:
        raise ValueError("fixture sample count does not match payload size")
    samples = np.frombuffer(body, dtype="<f4").astype(np.float64)
    return SampledWaveform(samples, float(rate))
