"""Bit transport by pulse repetition time (PRT) coding.

A 1 is one rectangular pulse period of 800 us, a 0 one of 600 us, both
50% duty at 20 mV. Recovery is purely timing based: a comparator turns
the (possibly distorted) waveform back into a square wave, the intervals
between successive comparator negative edges are measured, and each
interval is classified against a 700 us threshold.

The comparator is wired inverting: its output sits high while the input
is below its running mean and drops the moment the input swings high.
Its negative edges therefore land on pulse *period starts*, so each
edge-to-edge interval equals exactly one bit's PRT regardless of the
neighbouring bits. (Timing mid-period transitions instead would average
adjacent PRTs and park every 1-0 boundary exactly on the threshold.)

The last bit's period needs a closing edge, so transmit paths append one
terminator pulse of the short period after the payload
(``terminate=True``); its rising front supplies the final edge and it
contributes no interval of its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousIntervalError, PulseDecodeError
from .waveform import SampledWaveform

# 1 us count resolution; the 100 us decision gap spans 100 counts.
DEFAULT_PULSE_RATE = 1_000_000.0
MIN_PULSE_RATE = 100_000.0


@dataclass(frozen=True)
class PulseParams:
    """Pulse geometry and the decode threshold."""

    prt_one: float = 800e-6
    prt_zero: float = 600e-6
    duty: float = 0.5
    amplitude: float = 0.020
    threshold: float = 700e-6

    def __post_init__(self):
        if not 0 < self.duty < 1:
            raise ValueError(f"duty must be in (0, 1), got {self.duty}")
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if not self.prt_zero < self.threshold < self.prt_one:
            raise ValueError(
                "threshold must sit strictly between prt_zero and prt_one"
            )

    def prt(self, bit: int) -> float:
        return self.prt_one if bit else self.prt_zero


def encode_bits_to_pulses(
    bits,
    params: PulseParams | None = None,
    rate: float = DEFAULT_PULSE_RATE,
    *,
    terminate: bool = False,
) -> SampledWaveform:
    """Emit one rectangular pulse period per bit.

    Each period starts high at ``params.amplitude`` for duty * PRT and
    returns to 0 V for the rest. ``terminate`` appends one extra short
    period so a decoder sees a closing edge for the last payload bit.
    """
    params = params or PulseParams()
    if rate < MIN_PULSE_RATE:
        raise ValueError(
            f"sample rate {rate} Hz too low to resolve the PRT classes "
            f"(minimum {MIN_PULSE_RATE:.0f} Hz)"
        )
    bits = list(bits)
    if terminate:
        bits.append(0)
    chunks = []
    for bit in bits:
        if bit not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {bit!r}")
        n_total = int(round(params.prt(bit) * rate))
        n_high = int(round(params.duty * params.prt(bit) * rate))
        period = np.zeros(n_total)
        period[:n_high] = params.amplitude
        chunks.append(period)
    samples = np.concatenate(chunks) if chunks else np.zeros(0)
    return SampledWaveform(samples, rate)


def _running_mean(x: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average, shrinking the window near the ends."""
    window = max(1, min(window, x.size))
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(x.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, x.size)
    return (csum[hi] - csum[lo]) / (hi - lo)


def zero_crossing_detect(
    w: SampledWaveform,
    hysteresis: float | None = None,
    mean_window: float = 4 * 800e-6,
) -> tuple[SampledWaveform, np.ndarray]:
    """Comparator stage: square up the input and locate its negative edges.

    The running mean over ``mean_window`` seconds is subtracted first so
    unipolar pulse trains actually cross zero. The comparator applies a
    symmetric hysteresis band (default: 25% of the 99th-percentile
    excursion) and outputs -1 while the input is high, +1 while low.
    Returned edge indices are the +1 -> -1 output transitions, i.e. the
    samples where the input swings upward through the band.
    """
    x = w.samples
    if x.size == 0:
        raise ValueError("cannot run the comparator on an empty waveform")
    raw_scale = abs(float(np.mean(x))) + float(np.ptp(x)) if x.size else 0.0
    x = x - _running_mean(x, int(round(mean_window * w.rate)))
    if hysteresis is None:
        # 25% of the 99th-percentile excursion, spike-resistant. The
        # floor keeps numeric dust on flat inputs below the band.
        magnitude = np.abs(x)
        k = int(0.99 * (magnitude.size - 1))
        hysteresis = max(0.25 * np.partition(magnitude, k)[k], 1e-9 * raw_scale)
    elif hysteresis < 0:
        raise ValueError("hysteresis must be non-negative")

    # +1 where clearly high, -1 where clearly low, 0 inside the band.
    region = np.zeros(x.size, dtype=np.int8)
    region[x > hysteresis] = 1
    region[x < -hysteresis] = -1

    if not region.any():
        # Input never leaves the band: output rests in the low-input state.
        return SampledWaveform(np.ones(x.size), w.rate), np.zeros(0, dtype=np.int64)

    # Hold the last decided level through the band (comparator memory);
    # before the first decision the input counts as low.
    idx = np.arange(x.size)
    last = np.maximum.accumulate(np.where(region != 0, idx, -1))
    state = np.where(last >= 0, region[np.maximum(last, 0)], -1)

    rising = np.flatnonzero((state[:-1] == -1) & (state[1:] == 1)) + 1
    if state[0] == 1:
        # Signal starts high: the output falls on the very first sample.
        rising = np.concatenate(([0], rising))
    square = SampledWaveform(-state.astype(np.float64), w.rate)
    return square, rising.astype(np.int64)


def measure_prt(edges, rate: float) -> np.ndarray:
    """Durations between consecutive negative edges, in seconds.

    Resolution is one sample period: the simulated counter ticks at the
    waveform's sample rate.
    """
    edges = np.asarray(edges)
    if edges.size < 2:
        raise PulseDecodeError("need at least two edges to measure an interval")
    return np.diff(edges) / rate


def classify_prt(prt: float, params: PulseParams | None = None) -> int:
    """0 below the threshold, 1 above; exactly on it is undecidable."""
    params = params or PulseParams()
    if not prt > 0:
        raise ValueError(f"interval must be positive, got {prt}")
    if prt == params.threshold:
        raise AmbiguousIntervalError(
            f"interval {prt * 1e6:.1f} us sits exactly on the threshold"
        )
    return 1 if prt > params.threshold else 0


def decode_pulses(
    w: SampledWaveform,
    params: PulseParams | None = None,
    hysteresis: float | None = None,
) -> list[int]:
    """Full code recovery: comparator, interval measurement, thresholding."""
    params = params or PulseParams()
    if len(w) == 0:
        raise PulseDecodeError("empty waveform")
    _square, edges = zero_crossing_detect(
        w, hysteresis, mean_window=4 * params.prt_one
    )
    if edges.size < 2:
        raise PulseDecodeError(f"no decodable pulses ({edges.size} edges found)")
    intervals = measure_prt(edges, w.rate)
    bits = []
    for i, prt in enumerate(intervals):
        try:
            bits.append(classify_prt(prt, params))
        except AmbiguousIntervalError as exc:
            raise AmbiguousIntervalError(
                f"interval {i} is ambiguous: {prt * 1e6:.1f} us", index=i
            ) from exc
    return bits
