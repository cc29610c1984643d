"""Audio features describing a mix's dynamics, spatialisation, and spectrum.

Five transforms feed the style loss: RMS and crest factor (dynamics), the
log bark-band spectrum (spectral balance), and stereo width / imbalance
(spatialisation). Width and imbalance read the channel pair; the rest read
one channel at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio_io import AudioBuffer
from .errors import AudioTooShortError, SilentAudioError, UnsupportedAudioError

EPSILON = 1e-8

BARK_BAND_COUNT = 24
BARK_LOW_HZ = 20.0

# Hann analysis grid shared with the bark-spectrum transform
STFT_WINDOW = 2048
STFT_HOP = 512


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude STFT frames: ``magnitudes[frame, bin]``."""

    magnitudes: np.ndarray
    window_size: int
    hop: int

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_bins(self) -> int:
        return self.magnitudes.shape[1]


@dataclass(frozen=True)
class BarkFilterbank:
    """Triangular filters over FFT bins, centers uniform on the Bark axis."""

    matrix: np.ndarray  # (band_count, n_bins)
    band_count: int = BARK_BAND_COUNT


def _hann(window_size: int) -> np.ndarray:
    n = np.arange(window_size)
    return 0.5 - 0.5 * np.cos(2.0 * math.pi * n / window_size)


def stft_magnitude(
    x: np.ndarray, window_size: int = STFT_WINDOW, hop: int = STFT_HOP
) -> Spectrogram:
    """Hann-windowed magnitude STFT; the trailing partial frame is dropped."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise UnsupportedAudioError("stft_magnitude expects a single channel")
    if len(x) < window_size:
        raise AudioTooShortError(
            f"signal of {len(x)} samples is shorter than one {window_size}-sample window"
        )
    n_frames = 1 + (len(x) - window_size) // hop
    frames = np.lib.stride_tricks.sliding_window_view(x, window_size)[::hop][:n_frames]
    spectra = np.fft.rfft(frames * _hann(window_size), axis=-1)
    return Spectrogram(np.abs(spectra), window_size, hop)


def rms(x: np.ndarray) -> float:
    """Root mean square of one channel."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise SilentAudioError("cannot take RMS of an empty signal")
    return float(np.sqrt(np.mean(np.square(x))))


def crest_factor(x: np.ndarray) -> float:
    """Peak-to-RMS ratio in dB."""
    level = rms(x)
    if level == 0.0:
        raise SilentAudioError("crest factor of silence is undefined")
    return float(20.0 * math.log10(np.max(np.abs(x)) / level))


def bark_frequency(hz: np.ndarray | float) -> np.ndarray | float:
    """Zwicker arctan approximation of the Bark axis."""
    hz = np.asarray(hz, dtype=np.float64)
    return 13.0 * np.arctan(0.00076 * hz) + 3.5 * np.arctan(np.square(hz / 7500.0))


def build_bark_filterbank(
    window_size: int = STFT_WINDOW, sample_rate: int = 44100
) -> BarkFilterbank:
    """24 triangular filters spanning 20 Hz to Nyquist, uniform in Bark.

    Each triangle rises from the previous band's center and falls to the
    next's; rows are left unnormalized.
    """
    n_bins = window_size // 2 + 1
    bin_bark = np.asarray(
        bark_frequency(np.arange(n_bins) * sample_rate / window_size)
    )
    edges = np.linspace(
        float(bark_frequency(BARK_LOW_HZ)),
        float(bark_frequency(sample_rate / 2.0)),
        BARK_BAND_COUNT + 2,
    )
    matrix = np.zeros((BARK_BAND_COUNT, n_bins))
    for band in range(BARK_BAND_COUNT):
        lo, center, hi = edges[band], edges[band + 1], edges[band + 2]
        rising = (bin_bark - lo) / (center - lo)
        falling = (hi - bin_bark) / (hi - center)
        matrix[band] = np.clip(np.minimum(rising, falling), 0.0, None)
    return BarkFilterbank(matrix)


@lru_cache(maxsize=4)
def _default_filterbank(window_size: int, sample_rate: int) -> BarkFilterbank:
    return build_bark_filterbank(window_size, sample_rate)


def bark_spectrum(x: np.ndarray, filterbank: BarkFilterbank | None = None) -> np.ndarray:
    """Log bark-band energies, shape (frames, 24): log(FB . |STFT| + 1e-8)."""
    spec = stft_magnitude(x, STFT_WINDOW, STFT_HOP)
    if filterbank is None:
        filterbank = _default_filterbank(STFT_WINDOW, 44100)
    return np.log(spec.magnitudes @ filterbank.matrix.T + EPSILON)


def stereo_width(mix: AudioBuffer) -> float:
    """Side-to-mid energy ratio: mean((L-R)^2) / (mean((L+R)^2) + eps)."""
    if not mix.is_stereo:
        raise UnsupportedAudioError("stereo width needs a stereo buffer")
    left, right = mix.samples
    side = float(np.mean(np.square(left - right)))
    mid = float(np.mean(np.square(left + right)))
    return side / (mid + EPSILON)


def stereo_imbalance(mix: AudioBuffer) -> float:
    """Right-vs-left energy skew in [-1, 1]; -1 is left-only, +1 right-only."""
    if not mix.is_stereo:
        raise UnsupportedAudioError("stereo imbalance needs a stereo buffer")
    left, right = mix.samples
    left_e = float(np.mean(np.square(left)))
    right_e = float(np.mean(np.square(right)))
    return (right_e - left_e) / (right_e + left_e + EPSILON)
