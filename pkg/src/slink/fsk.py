"""Binary FSK carrier stage for the two-level pulse waveform.

The real radio shifts between two tones around a 900 MHz carrier; that
is not a desk-scale simulation, so the defaults park the tones at 60 and
100 kHz on a 1 MHz sample grid and `nominal_rf` merely records the
carrier the scaling stands in for. Protocol behaviour does not depend on
the carrier choice.

Demodulation is noncoherent: two sliding single-bin energy detectors
(one per tone) slide across the signal and the louder band wins. The
output is again a two-level waveform, ready for the pulse comparator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModulationError
from .waveform import SampledWaveform

# Tone gap must resolve the fastest pulse rate: 4 cycles of difference
# across the shortest (600 us) period.
MIN_TONE_SEPARATION_HZ = 4 / 600e-6


@dataclass(frozen=True)
class FskParams:
    f_space: float = 60e3      # tone for the low level
    f_mark: float = 100e3      # tone for the high level
    rate: float = 1e6
    amplitude: float = 0.020   # level of the two-level waveform carried
    level_threshold: float | None = None  # defaults to amplitude / 2
    window: float = 100e-6     # discriminator window, one sixth of the short PRT
    nominal_rf: float = 900e6  # documentation only, never simulated

    def __post_init__(self):
        if not 0 < self.f_space < self.f_mark < self.rate / 2:
            raise ValueError("need 0 < f_space < f_mark < rate/2")
        if self.f_mark - self.f_space < MIN_TONE_SEPARATION_HZ:
            raise ValueError(
                f"tone separation {self.f_mark - self.f_space:.0f} Hz too small "
                f"to resolve the fastest pulse rate ({MIN_TONE_SEPARATION_HZ:.0f} Hz)"
            )
        if self.window <= 0:
            raise ValueError("window must be positive")

    @property
    def threshold(self) -> float:
        return (
            self.level_threshold
            if self.level_threshold is not None
            else self.amplitude / 2
        )


def fsk_modulate(w: SampledWaveform, p: FskParams | None = None) -> SampledWaveform:
    """Map the two input levels onto two tones, phase-continuous, unit amplitude."""
    p = p or FskParams()
    x = w.samples
    if x.size == 0:
        return SampledWaveform(np.zeros(0), p.rate)
    near_low = np.abs(x) <= 0.1 * p.amplitude
    near_high = np.abs(x - p.amplitude) <= 0.1 * p.amplitude
    if not np.all(near_low | near_high):
        bad = int(np.flatnonzero(~(near_low | near_high))[0])
        raise ModulationError(
            f"input is not two-level: sample {bad} = {x[bad]:.6f} V"
        )
    freq = np.where(x >= p.threshold, p.f_mark, p.f_space)
    phase = 2 * np.pi * np.cumsum(freq) / p.rate
    return SampledWaveform(np.sin(phase), p.rate)


def _sliding_tone_energy(x: np.ndarray, freq: float, rate: float, length: int) -> np.ndarray:
    """|windowed correlation|^2 against one complex tone, window centered."""
    n = np.arange(x.size)
    mixed = x * np.exp(-2j * np.pi * freq * n / rate)
    csum = np.concatenate(([0.0 + 0.0j], np.cumsum(mixed)))
    sums = csum[length:] - csum[:-length]          # window [i, i+length)
    energy = np.abs(sums) ** 2
    lead = length // 2
    return np.pad(energy, (lead, x.size - energy.size - lead), mode="edge")


# A band must beat the other by this factor before the output switches;
# in between, the previous decision holds. Stops one-sample chatter at
# tone boundaries, where the energy ratio wobbles through unity.
_DISCRIMINATION_MARGIN = 2.0


def fsk_demodulate(w: SampledWaveform, p: FskParams | None = None) -> SampledWaveform:
    """Recover a two-level waveform by comparing mark and space band energies."""
    p = p or FskParams()
    x = w.samples
    if x.size == 0:
        return SampledWaveform(np.zeros(0), p.rate)
    length = max(4, int(round(p.window * p.rate)))
    length = min(length, x.size)
    e_mark = _sliding_tone_energy(x, p.f_mark, p.rate, length)
    e_space = _sliding_tone_energy(x, p.f_space, p.rate, length)

    region = np.zeros(x.size, dtype=np.int8)
    region[e_mark > _DISCRIMINATION_MARGIN * e_space] = 1
    region[e_space > _DISCRIMINATION_MARGIN * e_mark] = -1
    initial = 1 if e_mark[0] > e_space[0] else -1
    if not region.any():
        state = np.full(x.size, initial, dtype=np.int8)
    else:
        idx = np.arange(x.size)
        last = np.maximum.accumulate(np.where(region != 0, idx, -1))
        state = np.where(last >= 0, region[np.maximum(last, 0)], initial)
    levels = np.where(state == 1, p.amplitude, 0.0)
    return SampledWaveform(levels, p.rate)
