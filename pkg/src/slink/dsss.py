"""Direct-sequence spreading with maximal-length PN codes.

Works at abstract baseband: chips are +/-1 samples, impairments are
additive. The code generator is a Fibonacci LFSR; tap set {n, k, ...}
feeds back the XOR of the bits k steps back, so taps {7, 6} realise a
degree-7 maximal-length recurrence (period 127). Primitivity is not
assumed: generation fails loudly if the register revisits its seed
early or misses it at full period.

The jammer Bit-error-rate experiment quantifies processing gain: a single
sinusoidal interferer at a fixed jammer-to-signal ratio is despread at
several spreading factors and the error rates are tabulated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SequenceError

DEFAULT_DEGREE = 7
DEFAULT_TAPS = (7, 6)


@dataclass(frozen=True)
class LfsrSpec:
    """Shift-register description: degree, feedback taps, nonzero seed."""

    degree: int = DEFAULT_DEGREE
    taps: tuple[int, ...] = DEFAULT_TAPS
    seed: int = 1

    def __post_init__(self):
        if not 2 <= self.degree <= 16:
            raise SequenceError(f"degree must be in 2..16, got {self.degree}")
        if not self.taps:
            raise SequenceError("taps must not be empty")
        if any(not 1 <= t <= self.degree for t in self.taps):
            raise SequenceError(f"taps must be in 1..{self.degree}, got {self.taps}")
        if len(set(self.taps)) != len(self.taps):
            raise SequenceError("taps must be distinct")
        if not 0 < self.seed < (1 << self.degree):
            raise SequenceError(
                f"seed must be a nonzero {self.degree}-bit value, got {self.seed}"
            )

    @property
    def period(self) -> int:
        return (1 << self.degree) - 1


@dataclass(frozen=True)
class PnSequence:
    """One period of +/-1 chips from a maximal-length register."""

    chips: np.ndarray
    degree: int

    @property
    def length(self) -> int:
        return self.chips.size


def generate_m_sequence(spec: LfsrSpec | None = None) -> PnSequence:
    """Run the LFSR one full period, mapping output bits 1 -> +1, 0 -> -1.

    Raises SequenceError if the taps are not primitive: either the state
    returns to the seed before 2^n - 1 steps, or fails to return exactly
    at 2^n - 1.
    """
    spec = spec or LfsrSpec()
    n = spec.degree
    state = spec.seed
    out = np.empty(spec.period, dtype=np.int8)
    for i in range(spec.period):
        out[i] = 1 if (state & 1) else -1
        feedback = 0
        for tap in spec.taps:
            feedback ^= (state >> (n - tap)) & 1
        state = (state >> 1) | (feedback << (n - 1))
        if state == spec.seed and i != spec.period - 1:
            raise SequenceError(
                f"taps {spec.taps} are not primitive: period {i + 1} < {spec.period}"
            )
    if state != spec.seed:
        raise SequenceError(
            f"taps {spec.taps} are not primitive: register did not return to its "
            f"seed after {spec.period} steps"
        )
    return PnSequence(chips=out, degree=n)


def autocorrelation(pn: PnSequence, lag: int) -> int:
    """Periodic autocorrelation at one lag (exact integer)."""
    c = pn.chips.astype(np.int64)
    return int(np.dot(c, np.roll(c, -lag % pn.length)))


def spread(bits, pn: PnSequence) -> np.ndarray:
    """Multiply each data bit (1 -> +1, 0 -> -1) by one full PN period."""
    bits = np.asarray(list(bits))
    if bits.size == 0:
        raise ValueError("no bits to spread")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    levels = np.where(bits == 1, 1.0, -1.0)
    return (levels[:, None] * pn.chips[None, :]).ravel()


@dataclass(frozen=True)
class DespreadResult:
    bits: list[int]
    confidence: np.ndarray  # |correlation| per bit, max = PN length


def despread(chips, pn: PnSequence, offset: int = 0) -> DespreadResult:
    """Correlate PN-aligned chip blocks back into bits.

    The sign of each block's correlation decides the bit; the magnitude
    is reported so callers can judge alignment or code mismatch.
    """
    chips = np.asarray(chips, dtype=np.float64)
    n = pn.length
    if offset < 0:
        raise ValueError("offset must be non-negative")
    usable = chips.size - offset
    if usable < n:
        raise ValueError(
            f"need at least {n} chips past the offset, have {max(usable, 0)}"
        )
    n_bits = usable // n
    blocks = chips[offset : offset + n_bits * n].reshape(n_bits, n)
    corr = blocks @ pn.chips.astype(np.float64)
    bits = [1 if c > 0 else 0 for c in corr]
    return DespreadResult(bits=bits, confidence=np.abs(corr))


def acquire(chips, pn: PnSequence) -> int:
    """Find the chip phase of a spread stream by exhaustive correlation.

    Checks every offset in [0, N) against one PN period and returns the
    one with the largest |correlation|, smallest offset winning ties.
    """
    chips = np.asarray(chips, dtype=np.float64)
    n = pn.length
    if chips.size < 2 * n:
        raise ValueError(f"need at least two PN periods ({2 * n} chips) to acquire")
    ref = pn.chips.astype(np.float64)
    scores = np.array([abs(np.dot(chips[k : k + n], ref)) for k in range(n)])
    return int(np.argmax(scores))  # argmax returns the first (smallest) maximiser


# --- jammer / processing-gain experiment -------------------------------

#: spreading factor -> generator; factor 1 means no spreading at all.
EXPERIMENT_CODES = {
    1: None,
    7: LfsrSpec(degree=3, taps=(3, 2), seed=0b111),
    127: LfsrSpec(degree=7, taps=(7, 6), seed=1),
}


@dataclass(frozen=True)
class BerRow:
    spreading: int
    js_db: float
    trials: int
    errors: int

    @property
    def ber(self) -> float:
        return self.errors / self.trials


def run_jammer_ber(
    spreading_factors=(1, 7, 127),
    js_db: float = 10.0,
    n_bits: int = 10_000,
    seed: int = 42,
    jammer_freq_per_chip: float = 0.123,
) -> list[BerRow]:
    """Measure BER against a single-tone jammer at fixed J/S for each factor.

    The jammer is one sinusoid at the chip rate with power js_db above
    the unit chip power; its phase is drawn once per factor from the
    seeded generator, so results are reproducible.
    """
    rows = []
    rng = np.random.default_rng(seed)
    amplitude = np.sqrt(2 * 10 ** (js_db / 10))
    for factor in spreading_factors:
        spec = EXPERIMENT_CODES.get(factor)
        if factor != 1 and spec is None:
            raise ValueError(f"no generator registered for spreading factor {factor}")
        bits = rng.integers(0, 2, size=n_bits)
        if factor == 1:
            stream = np.where(bits == 1, 1.0, -1.0)
            pn = PnSequence(chips=np.ones(1, dtype=np.int8), degree=0)
        else:
            pn = generate_m_sequence(spec)
            stream = spread(bits, pn)
        t = np.arange(stream.size)
        phase = rng.uniform(0, 2 * np.pi)
        jammer = amplitude * np.sin(2 * np.pi * jammer_freq_per_chip * t + phase)
        decoded = despread(stream + jammer, pn, 0)
        errors = int(np.sum(np.asarray(decoded.bits) != bits))
        rows.append(BerRow(spreading=factor, js_db=js_db, trials=n_bits, errors=errors))
    return rows


def format_ber_report(rows: list[BerRow]) -> str:
    """Plain-text table: N, J/S dB, trials, bit errors, BER."""
    lines = [f"{'N':>5}  {'J/S_dB':>7}  {'trials':>8}  {'bit_errors':>10}  {'BER':>10}"]
    for row in rows:
        lines.append(
            f"{row.spreading:>5}  {row.js_db:>7.1f}  {row.trials:>8}  "
            f"{row.errors:>10}  {row.ber:>10.6f}"
        )
    return "\n".join(lines)
