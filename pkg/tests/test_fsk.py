import numpy as np
import pytest

from slink.channel import ChannelConfig, apply_channel
from slink.errors import ModulationError
from slink.frames import HandshakeFrame, encode_frame
from slink.fsk import FskParams, fsk_demodulate, fsk_modulate
from slink.pulsecode import decode_pulses, encode_bits_to_pulses, zero_crossing_detect
from slink.waveform import SampledWaveform

P = FskParams()


def dominant_frequency(x: np.ndarray, rate: float) -> float:
    mags = np.abs(np.fft.rfft(x * np.hanning(x.size)))
    return float(np.argmax(mags) * rate / x.size)


def test_params_validation():
    with pytest.raises(ValueError):
        FskParams(f_space=100e3, f_mark=60e3)
    with pytest.raises(ValueError):
        FskParams(f_space=60e3, f_mark=63e3)  # separation below minimum
    with pytest.raises(ValueError):
        FskParams(f_mark=600e3, rate=1e6)  # above Nyquist


def test_constant_high_is_pure_mark_tone():
    w = SampledWaveform(np.full(10_000, P.amplitude), P.rate)
    out = fsk_modulate(w, P)
    assert dominant_frequency(out.samples, P.rate) == pytest.approx(P.f_mark, rel=0.01)
    assert np.max(np.abs(out.samples)) <= 1.0 + 1e-9


def test_constant_zero_is_pure_space_tone():
    w = SampledWaveform(np.zeros(10_000), P.rate)
    out = fsk_modulate(w, P)
    assert dominant_frequency(out.samples, P.rate) == pytest.approx(P.f_space, rel=0.01)


def test_modulate_rejects_non_two_level_input():
    w = SampledWaveform(np.linspace(0, P.amplitude, 1000), P.rate)
    with pytest.raises(ModulationError):
        fsk_modulate(w, P)


def test_phase_continuity():
    pulses = encode_bits_to_pulses([1, 0, 1, 0, 1], rate=P.rate, terminate=True)
    out = fsk_modulate(pulses, P)
    # A phase-continuous tone's sample-to-sample step is bounded by its
    # highest instantaneous frequency.
    max_step = 2 * np.pi * P.f_mark / P.rate + 1e-9
    assert np.max(np.abs(np.diff(out.samples))) <= max_step


def test_spectrogram_alternates_with_duty_cycle():
    pulses = encode_bits_to_pulses([1, 0], rate=P.rate)
    out = fsk_modulate(pulses, P)
    window = 100  # samples, well inside the 400/300-sample half-periods
    # Probe window centers against the pulse geometry: [0,400) high,
    # [400,800) low, [800,1100) high, [1100,1400) low.
    probes = {150: P.f_mark, 550: P.f_space, 900: P.f_mark, 1250: P.f_space}
    for center, expected in probes.items():
        chunk = out.samples[center - window // 2 : center + window // 2]
        assert dominant_frequency(chunk, P.rate) == pytest.approx(expected, rel=0.15)


def test_pure_mark_tone_demodulates_high():
    t = np.arange(20_000) / P.rate
    tone = SampledWaveform(np.sin(2 * np.pi * P.f_mark * t), P.rate)
    out = fsk_demodulate(tone, P)
    assert np.all(out.samples == P.amplitude)


def test_demodulator_output_is_two_valued():
    pulses = encode_bits_to_pulses([1, 0, 0, 1], rate=P.rate, terminate=True)
    noisy = apply_channel(fsk_modulate(pulses, P), ChannelConfig(snr_db=15, seed=5))
    out = fsk_demodulate(noisy, P)
    assert set(np.unique(out.samples)) <= {0.0, P.amplitude}


def test_round_trip_edge_placement():
    bits = [1, 0, 1, 1, 0, 0, 1]
    pulses = encode_bits_to_pulses(bits, rate=P.rate, terminate=True)
    recovered = fsk_demodulate(fsk_modulate(pulses, P), P)
    _sq, edges_in = zero_crossing_detect(pulses)
    _sq, edges_out = zero_crossing_detect(recovered)
    assert len(edges_in) == len(edges_out)
    window_samples = int(P.window * P.rate)
    assert np.max(np.abs(edges_in - edges_out)) <= window_samples


def test_modulated_frame_survives_awgn():
    bits = encode_frame(HandshakeFrame(src=8, dst=1))
    pulses = encode_bits_to_pulses(bits, rate=P.rate, terminate=True)
    noisy = apply_channel(fsk_modulate(pulses, P), ChannelConfig(snr_db=20, seed=11))
    assert decode_pulses(fsk_demodulate(noisy, P)) == bits


def test_monte_carlo_fsk_round_trip():
    from harness import random_frames, run_pulse_suite

    frames = random_frames(300, seed=5150)
    bit_errors, _fails = run_pulse_suite(
        frames, snr_db=20, lowpass_cutoff=None, use_fsk=True, seed=31
    )
    assert bit_errors == 0
