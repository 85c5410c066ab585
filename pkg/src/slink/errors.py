"""Exception types shared across the link simulator."""


class SlinkError(Exception):
    """Base class for all simulator errors."""


class FrameError(SlinkError):
    """Malformed or invalid handshake frame."""


class PulseDecodeError(SlinkError):
    """Pulse train could not be decoded back to bits."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class AmbiguousIntervalError(PulseDecodeError):
    """Measured interval sits exactly on the decision threshold."""


class ModulationError(SlinkError):
    """Input unsuitable for the modulator."""


class SequenceError(SlinkError):
    """LFSR or pseudo-noise sequence problem (bad seed, non-primitive taps)."""


class ToneError(SlinkError):
    """Tone symbol could not be decoded."""


class UnsupportedCharacterError(ToneError):
    """Character outside the tone alphabet."""


class SilenceError(ToneError):
    """Burst energy below the decode floor."""


class TransportError(SlinkError):
    """Datagram transport failure (oversize block, socket error, bad wire data)."""


class LinkError(SlinkError):
    """Operation not permitted in the current link state."""


class ConfigError(SlinkError):
    """Invalid node configuration."""
