"""Exception and warning types shared across the package."""


class MixmatchError(Exception):
    """Base class for all errors raised by this package."""


class SilentAudioError(MixmatchError):
    """An operation that needs signal energy was given (near-)silence."""


class NoActiveSegmentError(MixmatchError):
    """No window satisfying the active-energy threshold was found."""


class NoUsableTracksError(MixmatchError):
    """A multitrack directory yielded no non-silent tracks."""


class UnsupportedAudioError(MixmatchError):
    """Audio file has an unsupported format, sample rate, or layout."""


class AudioTooShortError(MixmatchError):
    """Signal is shorter than the analysis window or segment it must fill."""


class ParamRangeError(MixmatchError):
    """Console parameter outside its legal range, or a malformed vector."""


class InvalidConfigError(MixmatchError):
    """Optimizer or loss configuration with out-of-range settings."""


class ClippingWarning(UserWarning):
    """Samples exceeded full scale and were clipped during integer export."""
