"""Extended dual-tone coding for the 36-character chat alphabet.

Standard telephone DTMF only covers 16 keys, so the table here is a 6x6
grid: 36 characters (A-Z then 0-9, row-major) map to one row and one
column frequency each. Rows and columns are spaced so that every +/-5%
acceptance window is disjoint from every other (adjacent ratios >= 1.124,
versus the 1.1053 a 5% tolerance demands) and the highest tone stays
below Nyquist for 8 kHz audio.

Decoding is spectral: window, FFT, pick the two dominant peaks with
quadratic interpolation, and match each against the table within the
tolerance. Messages are segmented by short-time energy gating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SilenceError, ToneError, UnsupportedCharacterError
from .waveform import SampledWaveform, concat

DEFAULT_AUDIO_RATE = 8_000.0
DEFAULT_ROWS = (700.0, 790.0, 890.0, 1000.0, 1130.0, 1270.0)
DEFAULT_COLS = (1500.0, 1700.0, 1920.0, 2170.0, 2450.0, 2770.0)
CHARSET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"

#: marker emitted for a burst that refuses to decode
SUBSTITUTION = "?"

_RMS_SILENCE_FLOOR = 1e-8


@dataclass(frozen=True)
class ToneTable:
    """Character -> (row, column) frequency lookup with match tolerance."""

    rows: tuple[float, ...] = DEFAULT_ROWS
    cols: tuple[float, ...] = DEFAULT_COLS
    charset: str = CHARSET
    tolerance: float = 0.05

    def __post_init__(self):
        if len(self.rows) * len(self.cols) != len(self.charset):
            raise ValueError("charset size must equal rows x cols")
        if len(self.charset) != len(set(self.charset)):
            raise ValueError("charset characters must be unique")
        freqs = (*self.rows, *self.cols)
        if len(set(freqs)) != len(freqs):
            raise ValueError("row and column frequencies must be pairwise distinct")
        if not 0 < self.tolerance < 0.5:
            raise ValueError("tolerance must be a small positive fraction")
        ordered = sorted(freqs)
        for lo, hi in zip(ordered, ordered[1:]):
            if not hi * (1 - self.tolerance) > lo * (1 + self.tolerance):
                raise ValueError(
                    f"acceptance windows of {lo:.0f} Hz and {hi:.0f} Hz overlap "
                    f"at tolerance {self.tolerance:.0%}"
                )

    def check_rate(self, rate: float) -> None:
        top = max(*self.rows, *self.cols)
        if not top * (1 + self.tolerance) < rate / 2:
            raise ValueError(
                f"audio rate {rate} Hz cannot carry the {top:.0f} Hz tone "
                f"plus its tolerance window"
            )

    def pair_for(self, char: str) -> tuple[float, float]:
        char = char.upper()
        idx = self.charset.find(char)
        if idx < 0:
            raise UnsupportedCharacterError(f"character {char!r} is not codable")
        return self.rows[idx // len(self.cols)], self.cols[idx % len(self.cols)]

    def char_at(self, row_index: int, col_index: int) -> str:
        return self.charset[row_index * len(self.cols) + col_index]


@dataclass(frozen=True)
class SymbolTiming:
    tone_duration: float = 0.040
    gap_duration: float = 0.040
    amplitude: float = 0.5  # per tone; the pair peaks at about twice this

    def __post_init__(self):
        if self.tone_duration < 0.020:
            raise ValueError("tones shorter than 20 ms cannot be resolved reliably")
        if self.gap_duration < 0:
            raise ValueError("gap duration must be non-negative")
        if not 0 < self.amplitude <= 1:
            raise ValueError("amplitude must be in (0, 1]")


def dtmf_encode(
    char: str,
    table: ToneTable | None = None,
    timing: SymbolTiming | None = None,
    rate: float = DEFAULT_AUDIO_RATE,
) -> SampledWaveform:
    """One symbol: the character's two tones summed, then a silent gap."""
    table = table or ToneTable()
    timing = timing or SymbolTiming()
    table.check_rate(rate)
    f_row, f_col = table.pair_for(char)
    n_tone = int(round(timing.tone_duration * rate))
    n_gap = int(round(timing.gap_duration * rate))
    t = np.arange(n_tone) / rate
    burst = timing.amplitude * (
        np.sin(2 * np.pi * f_row * t) + np.sin(2 * np.pi * f_col * t)
    )
    return SampledWaveform(np.concatenate([burst, np.zeros(n_gap)]), rate)


def spectrum_peaks(
    w: SampledWaveform,
    k: int,
    *,
    pad_factor: int = 8,
    min_separation_hz: float = 50.0,
) -> list[tuple[float, float]]:
    """The k strongest spectral peaks as (frequency Hz, magnitude).

    Hann window, zero-padded FFT, local maxima ranked by magnitude with
    a minimum mutual spacing, each refined by quadratic interpolation on
    the log spectrum. Silence produces numeric-dust peaks (or none);
    callers gate on energy.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    x = w.samples
    if x.size == 0:
        raise ValueError("cannot analyse an empty waveform")
    x = x * np.hanning(x.size)
    nfft = pad_factor * (1 << int(np.ceil(np.log2(max(x.size, 2)))))
    mags = np.abs(np.fft.rfft(x, nfft))
    if mags.size < 3:
        return []
    interior = np.flatnonzero((mags[1:-1] > mags[:-2]) & (mags[1:-1] >= mags[2:])) + 1
    if interior.size == 0:
        return []
    order = interior[np.argsort(mags[interior])[::-1]]
    bin_hz = w.rate / nfft
    chosen: list[int] = []
    for idx in order:
        if len(chosen) == k:
            break
        if all(abs(idx - c) * bin_hz >= min_separation_hz for c in chosen):
            chosen.append(int(idx))
    peaks = []
    logm = np.log(mags + 1e-30)
    for idx in chosen:
        y1, y2, y3 = logm[idx - 1], logm[idx], logm[idx + 1]
        denom = y1 - 2 * y2 + y3
        delta = 0.0 if denom == 0 else 0.5 * (y1 - y3) / denom
        delta = float(np.clip(delta, -0.5, 0.5))
        freq = (idx + delta) * bin_hz
        mag = float(np.exp(y2 - 0.25 * (y1 - y3) * delta))
        peaks.append((freq, mag))
    return peaks


def match_frequency(freq: float, table: ToneTable | None = None):
    """Locate freq in the table within tolerance: ('row'|'col', index) or None.

    Disjoint windows guarantee at most one entry can match.
    """
    table = table or ToneTable()
    if not freq > 0:
        raise ValueError("frequency must be positive")
    for band, entries in (("row", table.rows), ("col", table.cols)):
        for i, f in enumerate(entries):
            if abs(freq - f) <= table.tolerance * f:
                return band, i
    return None


def dtmf_decode_symbol(w: SampledWaveform, table: ToneTable | None = None) -> str:
    """Decode one tone burst: top two peaks must match one row and one column."""
    table = table or ToneTable()
    table.check_rate(w.rate)
    if len(w) == 0:
        raise ToneError("empty burst")
    rms = float(np.sqrt(np.mean(w.samples**2)))
    if rms < _RMS_SILENCE_FLOOR:
        raise SilenceError(f"burst energy below decode floor (rms {rms:.3e})")
    peaks = spectrum_peaks(w, 2)
    if len(peaks) < 2:
        raise ToneError("fewer than two spectral peaks found")
    matches = [match_frequency(freq, table) for freq, _mag in peaks]
    row_hits = [m[1] for m in matches if m and m[0] == "row"]
    col_hits = [m[1] for m in matches if m and m[0] == "col"]
    if len(row_hits) != 1 or len(col_hits) != 1:
        detail = ", ".join(f"{freq:.1f} Hz" for freq, _ in peaks)
        raise ToneError(
            f"need exactly one row and one column tone, got peaks at {detail}"
        )
    return table.char_at(row_hits[0], col_hits[0])


def encode_message(
    text: str,
    table: ToneTable | None = None,
    timing: SymbolTiming | None = None,
    rate: float = DEFAULT_AUDIO_RATE,
) -> SampledWaveform:
    """Concatenated symbol encodings for a whole string (case-folded)."""
    table = table or ToneTable()
    timing = timing or SymbolTiming()
    if not text:
        raise ValueError("nothing to encode")
    parts = []
    for i, char in enumerate(text):
        try:
            parts.append(dtmf_encode(char, table, timing, rate))
        except UnsupportedCharacterError as exc:
            raise UnsupportedCharacterError(f"character {i} ({char!r}): {exc}") from exc
    return concat(parts)


def _energy_bursts(x: np.ndarray, rate: float, frame_duration: float, gate: float):
    """Yield (start, stop) sample ranges of contiguous above-gate frames."""
    frame = max(1, int(round(frame_duration * rate)))
    n_frames = x.size // frame
    if n_frames == 0:
        return []
    energy = (x[: n_frames * frame].reshape(n_frames, frame) ** 2).mean(axis=1)
    active = energy > gate * energy.max()
    bursts = []
    start = None
    for i, on in enumerate(active):
        if on and start is None:
            start = i
        elif not on and start is not None:
            bursts.append((start * frame, i * frame))
            start = None
    if start is not None:
        bursts.append((start * frame, n_frames * frame))
    return bursts


def decode_message(
    w: SampledWaveform,
    table: ToneTable | None = None,
    *,
    frame_duration: float = 0.005,
    energy_gate: float = 0.10,
    min_burst_duration: float = 0.010,
) -> str:
    """Segment a tone/gap stream by energy and decode each burst.

    A burst that fails to decode becomes the substitution marker instead
    of aborting the message.
    """
    table = table or ToneTable()
    if len(w) == 0:
        return ""
    if float(np.sqrt(np.mean(w.samples**2))) < _RMS_SILENCE_FLOOR:
        return ""
    out = []
    min_samples = int(round(min_burst_duration * w.rate))
    for start, stop in _energy_bursts(w.samples, w.rate, frame_duration, energy_gate):
        if stop - start < min_samples:
            continue
        burst = SampledWaveform(w.samples[start:stop], w.rate)
        try:
            out.append(dtmf_decode_symbol(burst, table))
        except ToneError:
            out.append(SUBSTITUTION)
    return "".join(out)
