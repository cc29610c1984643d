"""WAV I/O, loudness metering, and multitrack loading.

All audio in this package lives in :class:`AudioBuffer`: float64 samples in a
``(channels, length)`` array at 44100 Hz, nominal full scale +/-1. Loudness is
RMS-based dBFS (20*log10 of the all-channel RMS); the -48/-16/-22 dBFS targets
used elsewhere are anchors on that scale, not a perceptual loudness standard.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import (
    AudioTooShortError,
    ClippingWarning,
    NoActiveSegmentError,
    NoUsableTracksError,
    SilentAudioError,
    UnsupportedAudioError,
)

SAMPLE_RATE = 44100

# mean-energy floor (1/N * sum x^2) for "active" audio, i.e. RMS >= ~-30 dBFS
ACTIVE_ENERGY_THRESHOLD = 1e-3

# tracks quieter than this mean energy are treated as silent when loading
SILENT_TRACK_ENERGY = 1e-8

_SEGMENT_SEARCH_ATTEMPTS = 100


@dataclass(frozen=True)
class AudioBuffer:
    """Multichannel sample store: ``samples[channel, frame]`` at 44100 Hz."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2:
            raise UnsupportedAudioError(
                f"samples must be 1-D or (channels, length), got shape {samples.shape}"
            )
        if samples.shape[0] not in (1, 2):
            raise UnsupportedAudioError(
                f"only mono or stereo buffers are supported, got {samples.shape[0]} channels"
            )
        if self.sample_rate != SAMPLE_RATE:
            raise UnsupportedAudioError(
                f"unsupported sample rate {self.sample_rate}, expected {SAMPLE_RATE}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.samples.shape[1] / self.sample_rate

    @property
    def is_stereo(self) -> bool:
        return self.samples.shape[0] == 2

    def slice(self, start: int, stop: int) -> "AudioBuffer":
        return AudioBuffer(self.samples[:, start:stop].copy(), self.sample_rate)

    def scaled(self, factor: float) -> "AudioBuffer":
        return AudioBuffer(self.samples * factor, self.sample_rate)


@dataclass(frozen=True)
class MultitrackSet:
    """Ordered mono tracks sharing one length; stereo sources arrive split."""

    tracks: list[AudioBuffer]
    names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.tracks:
            raise NoUsableTracksError("multitrack set must contain at least one track")
        if not self.names:
            object.__setattr__(self, "names", [f"track{i}" for i in range(len(self.tracks))])
        if len(self.names) != len(self.tracks):
            raise ValueError("names and tracks length mismatch")
        length = self.tracks[0].n_samples
        for t in self.tracks:
            if t.n_channels != 1:
                raise UnsupportedAudioError("multitrack sets hold mono tracks only")
            if t.n_samples != length:
                raise ValueError("all tracks must share the same length")

    @property
    def n_tracks(self) -> int:
        return len(self.tracks)

    @property
    def n_samples(self) -> int:
        return self.tracks[0].n_samples

    def slice(self, start: int, stop: int) -> "MultitrackSet":
        return MultitrackSet(
            [t.slice(start, stop) for t in self.tracks], list(self.names)
        )


@dataclass(frozen=True)
class LoudnessStats:
    """RMS loudness and peak of a buffer, in dB relative to full scale."""

    loudness_dbfs: float
    peak_dbfs: float
    rms_linear: float


def mean_energy(samples: np.ndarray) -> float:
    """Mean of squared samples over every channel and frame."""
    return float(np.mean(np.square(samples)))


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a PCM16/PCM24/float32 RIFF WAV into a normalized buffer.

    Integer formats are scaled by their full-scale value, so PCM16 sample
    32767 decodes to 32767/32768. Anything but 1-2 channels at 44100 Hz is
    rejected.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    try:
        rate, data = wavfile.read(str(path))
    except Exception as exc:
        raise UnsupportedAudioError(f"cannot decode {path.name}: {exc}") from exc
    if rate != SAMPLE_RATE:
        raise UnsupportedAudioError(
            f"unsupported sample rate {rate} in {path.name}, expected {SAMPLE_RATE}"
        )
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        # covers PCM24, which scipy loads left-justified into int32
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedAudioError(
            f"unsupported sample format {data.dtype} in {path.name}"
        )
    if samples.ndim == 1:
        samples = samples[np.newaxis, :]
    else:
        if samples.shape[1] > 2:
            raise UnsupportedAudioError(
                f"{path.name} has {samples.shape[1]} channels, expected 1 or 2"
            )
        samples = samples.T
    return AudioBuffer(samples)


def write_wav(buffer: AudioBuffer, path: str | Path, format: str = "float32") -> None:
    """Write a buffer as float32 (lossless) or pcm16 (quantized) WAV.

    pcm16 export clips anything beyond full scale and records a
    :class:`ClippingWarning`; float32 writes samples verbatim.
    """
    path = Path(path)
    data = buffer.samples.T if buffer.is_stereo else buffer.samples[0]
    if format == "float32":
        wavfile.write(str(path), buffer.sample_rate, data.astype(np.float32))
    elif format == "pcm16":
        scaled = np.round(data * 32768.0)
        if np.any(scaled > 32767.0) or np.any(scaled < -32768.0):
            warnings.warn(
                f"samples beyond full scale clipped while writing {path.name}",
                ClippingWarning,
                stacklevel=2,
            )
        wavfile.write(
            str(path),
            buffer.sample_rate,
            np.clip(scaled, -32768.0, 32767.0).astype(np.int16),
        )
    else:
        raise UnsupportedAudioError(f"unknown output format {format!r}")


def measure_loudness_dbfs(buffer: AudioBuffer) -> LoudnessStats:
    """RMS loudness over all samples of all channels, plus the sample peak."""
    if buffer.n_samples == 0:
        raise SilentAudioError("empty buffer has no loudness")
    rms = math.sqrt(mean_energy(buffer.samples))
    if rms == 0.0:
        raise SilentAudioError("buffer is all zeros")
    peak = float(np.max(np.abs(buffer.samples)))
    return LoudnessStats(
        loudness_dbfs=20.0 * math.log10(rms),
        peak_dbfs=20.0 * math.log10(peak),
        rms_linear=rms,
    )


def normalize_loudness(buffer: AudioBuffer, target_dbfs: float) -> AudioBuffer:
    """Scale a buffer so its RMS loudness lands on ``target_dbfs``.

    No clipping is applied; samples may leave [-1, 1] and only get clipped
    at pcm16 export time.
    """
    stats = measure_loudness_dbfs(buffer)
    factor = 10.0 ** ((target_dbfs - stats.loudness_dbfs) / 20.0)
    return buffer.scaled(factor)


def find_active_segment(buffer: AudioBuffer, length: int, rng_seed: int) -> int:
    """Find a window offset whose mean energy clears the active threshold.

    Tries up to 100 random offsets from a seeded generator and returns the
    first offset whose window satisfies mean(x^2) >= 1e-3.
    """
    if length <= 0:
        raise ValueError("segment length must be positive")
    if buffer.n_samples < length:
        raise AudioTooShortError(
            f"buffer of {buffer.n_samples} samples cannot hold a {length}-sample segment"
        )
    rng = np.random.default_rng(rng_seed)
    max_offset = buffer.n_samples - length
    for _ in range(_SEGMENT_SEARCH_ATTEMPTS):
        offset = int(rng.integers(0, max_offset + 1))
        window = buffer.samples[:, offset : offset + length]
        if mean_energy(window) >= ACTIVE_ENERGY_THRESHOLD:
            return offset
    raise NoActiveSegmentError(
        f"no window of {length} samples above energy {ACTIVE_ENERGY_THRESHOLD} "
        f"in {_SEGMENT_SEARCH_ATTEMPTS} attempts"
    )


def load_multitrack(
    directory: str | Path,
    max_tracks: int | None = None,
    seed: int = 0,
) -> MultitrackSet:
    """Load every WAV in a directory as -48 dBFS mono tracks.

    Stereo files are split into two mono tracks (``name.L`` / ``name.R``),
    silent tracks are dropped, shorter tracks are zero-padded to the longest,
    and each track is loudness-normalized to -48 dBFS. When more than
    ``max_tracks`` remain, a seeded random subset is kept (original order
    preserved).
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NoUsableTracksError(f"{directory} is not a directory")
    paths = sorted(
        (p for p in directory.iterdir() if p.suffix.lower() == ".wav"),
        key=lambda p: p.name,
    )
    if not paths:
        raise NoUsableTracksError(f"no .wav files in {directory}")

    mono: list[np.ndarray] = []
    names: list[str] = []
    for path in paths:
        buf = read_wav(path)
        if buf.is_stereo:
            channels = [(buf.samples[0], f"{path.name}.L"), (buf.samples[1], f"{path.name}.R")]
        else:
            channels = [(buf.samples[0], path.name)]
        for samples, name in channels:
            if mean_energy(samples) <= SILENT_TRACK_ENERGY:
                continue
            mono.append(samples)
            names.append(name)
    if not mono:
        raise NoUsableTracksError(f"every track in {directory} is silent")

    target_len = max(len(s) for s in mono)
    tracks = []
    for samples in mono:
        if len(samples) < target_len:
            samples = np.concatenate([samples, np.zeros(target_len - len(samples))])
        tracks.append(normalize_loudness(AudioBuffer(samples), -48.0))

    if max_tracks is not None and len(tracks) > max_tracks:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(tracks), size=max_tracks, replace=False))
        tracks = [tracks[i] for i in keep]
        names = [names[i] for i in keep]

    return MultitrackSet(tracks, names)
