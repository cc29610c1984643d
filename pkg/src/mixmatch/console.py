"""The mixing console: per-track channel strips plus a stereo master bus.

Each strip runs gain -> 4-band EQ -> compressor -> constant-power pan, the
wet stereo tracks are summed (not averaged), and the sum passes through a
linked-stereo master EQ and compressor. Every stage is stateless across
calls: filters and envelopes start from zero on each invocation, so a mix
is a pure function of (tracks, params).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import sosfilt

from .audio_io import AudioBuffer, MultitrackSet
from .errors import ParamRangeError, UnsupportedAudioError
from .params import (
    HIGH_SHELF,
    LOW_SHELF,
    PEAK,
    ChannelStripParams,
    CompressorParams,
    ConsoleParams,
    EqBandParams,
)

ENVELOPE_FLOOR = 1e-8

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 20.0)


def apply_gain(x: AudioBuffer, gain_db: float) -> AudioBuffer:
    """Scale samples by 10^(gain_db/20)."""
    return x.scaled(db_to_linear(gain_db))


def design_biquad(band: EqBandParams, sample_rate: int) -> np.ndarray:
    """RBJ audio-EQ cookbook biquad for one band.

    Returns (b0, b1, b2, a1, a2) normalized by a0. A band at exactly 0 dB
    short-circuits to the identity filter so flat settings are bit-inert.
    """
    if band.center_hz >= sample_rate / 2:
        raise ParamRangeError(
            f"center frequency {band.center_hz} Hz is at or above Nyquist"
        )
    if band.gain_db == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0, 0.0])

    a = 10.0 ** (band.gain_db / 40.0)
    w0 = 2.0 * math.pi * band.center_hz / sample_rate
    cos_w0 = math.cos(w0)
    alpha = math.sin(w0) / (2.0 * band.q)

    if band.kind == PEAK:
        b0 = 1.0 + alpha * a
        b1 = -2.0 * cos_w0
        b2 = 1.0 - alpha * a
        a0 = 1.0 + alpha / a
        a1 = -2.0 * cos_w0
        a2 = 1.0 - alpha / a
    elif band.kind == LOW_SHELF:
        two_sqrt_a_alpha = 2.0 * math.sqrt(a) * alpha
        b0 = a * ((a + 1.0) - (a - 1.0) * cos_w0 + two_sqrt_a_alpha)
        b1 = 2.0 * a * ((a - 1.0) - (a + 1.0) * cos_w0)
        b2 = a * ((a + 1.0) - (a - 1.0) * cos_w0 - two_sqrt_a_alpha)
        a0 = (a + 1.0) + (a - 1.0) * cos_w0 + two_sqrt_a_alpha
        a1 = -2.0 * ((a - 1.0) + (a + 1.0) * cos_w0)
        a2 = (a + 1.0) + (a - 1.0) * cos_w0 - two_sqrt_a_alpha
    elif band.kind == HIGH_SHELF:
        two_sqrt_a_alpha = 2.0 * math.sqrt(a) * alpha
        b0 = a * ((a + 1.0) + (a - 1.0) * cos_w0 + two_sqrt_a_alpha)
        b1 = -2.0 * a * ((a - 1.0) + (a + 1.0) * cos_w0)
        b2 = a * ((a + 1.0) + (a - 1.0) * cos_w0 - two_sqrt_a_alpha)
        a0 = (a + 1.0) - (a - 1.0) * cos_w0 + two_sqrt_a_alpha
        a1 = 2.0 * ((a - 1.0) - (a + 1.0) * cos_w0)
        a2 = (a + 1.0) - (a - 1.0) * cos_w0 - two_sqrt_a_alpha
    else:
        raise ParamRangeError(f"unknown EQ band kind {band.kind!r}")

    return np.array([b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0])


def _bands_to_sos(bands: tuple[EqBandParams, ...], sample_rate: int) -> np.ndarray:
    sos = np.zeros((len(bands), 6))
    for i, band in enumerate(bands):
        b0, b1, b2, a1, a2 = design_biquad(band, sample_rate)
        sos[i] = (b0, b1, b2, 1.0, a1, a2)
    return sos


def apply_eq(x: AudioBuffer, bands: tuple[EqBandParams, ...]) -> AudioBuffer:
    """Cascade the four band biquads (transposed direct form II, zero state)."""
    sos = _bands_to_sos(bands, x.sample_rate)
    return AudioBuffer(sosfilt(sos, x.samples, axis=-1), x.sample_rate)


@njit(cache=True)
def _envelope(
    detector: np.ndarray, alpha_attack: float, alpha_release: float, init: float
) -> np.ndarray:
    """One-pole envelope follower with attack/release switching."""
    out = np.empty_like(detector)
    e = init
    for i in range(detector.shape[0]):
        v = detector[i]
        alpha = alpha_attack if v > e else alpha_release
        e = alpha * e + (1.0 - alpha) * v
        out[i] = e
    return out


def _gain_computer_db(level_db: np.ndarray, p: CompressorParams) -> np.ndarray:
    """Soft-knee static curve: dB of gain reduction for each detector level."""
    over = level_db - p.threshold_db
    slope = 1.0 / p.ratio - 1.0
    above = slope * over
    if p.knee_db <= 1e-12:
        return np.where(over > 0.0, above, 0.0)
    knee = slope * np.square(over + p.knee_db / 2.0) / (2.0 * p.knee_db)
    return np.select(
        [2.0 * over < -p.knee_db, 2.0 * over > p.knee_db], [0.0, above], default=knee
    )


def apply_compressor(
    x: AudioBuffer, p: CompressorParams, sample_rate: int | None = None
) -> AudioBuffer:
    """Feed-forward compressor with a linked envelope across channels.

    The detector is the per-sample max of channel absolutes, smoothed by a
    one-pole follower whose time constant switches between attack (rising)
    and release (falling). The same computed gain is applied to every
    channel, so stereo imaging is preserved.

    Every invocation is stateless: the follower is primed at the detector's
    mean level (its fixed point on stationary input) instead of charging
    from zero, which would leave the opening attack-time of each rendered
    segment uncompressed and plant a spurious transient there.
    """
    fs = x.sample_rate if sample_rate is None else sample_rate
    detector = np.max(np.abs(x.samples), axis=0)
    alpha_attack = math.exp(-1.0 / (fs * p.attack_ms / 1000.0))
    alpha_release = math.exp(-1.0 / (fs * p.release_ms / 1000.0))
    envelope = _envelope(
        np.ascontiguousarray(detector),
        alpha_attack,
        alpha_release,
        float(np.mean(detector)),
    )
    level_db = 20.0 * np.log10(envelope + ENVELOPE_FLOOR)
    gain_db = _gain_computer_db(level_db, p) + p.makeup_db
    gain = np.power(10.0, gain_db / 20.0)
    return AudioBuffer(x.samples * gain[np.newaxis, :], x.sample_rate)


def apply_pan(x: AudioBuffer, pan: float) -> AudioBuffer:
    """Constant-power pan of a mono buffer: 0 hard left, 0.5 center, 1 right."""
    if x.n_channels != 1:
        raise UnsupportedAudioError("panning expects a mono buffer")
    if not 0.0 <= pan <= 1.0:
        raise ParamRangeError(f"pan {pan} outside [0, 1]")
    angle = pan * math.pi / 2.0
    gains = np.array([[math.cos(angle)], [math.sin(angle)]])
    return AudioBuffer(gains * x.samples[0][np.newaxis, :], x.sample_rate)


def process_channel_strip(x: AudioBuffer, p: ChannelStripParams) -> AudioBuffer:
    """Run one track through gain -> EQ -> compressor -> pan."""
    wet = apply_gain(x, p.gain_db)
    wet = apply_eq(wet, p.eq)
    wet = apply_compressor(wet, p.comp)
    return apply_pan(wet, p.pan)


def mix(tracks: MultitrackSet, params: ConsoleParams) -> AudioBuffer:
    """Sum the wet tracks and run the master bus (stereo EQ, then compressor)."""
    if params.n_tracks != tracks.n_tracks:
        raise ParamRangeError(
            f"params describe {params.n_tracks} strips but {tracks.n_tracks} "
            f"tracks were given"
        )
    bus = np.zeros((2, tracks.n_samples))
    for track, strip in zip(tracks.tracks, params.strips):
        bus += process_channel_strip(track, strip).samples
    out = AudioBuffer(bus)
    out = apply_eq(out, params.master.eq)
    return apply_compressor(out, params.master.comp)
