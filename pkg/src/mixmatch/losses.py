"""The two objectives: the audio-production style loss and MRSTFT.

The style loss is a weighted sum of squared feature distances. RMS, crest
factor, and the bark spectrum are compared per channel and averaged over the
pair; stereo width and imbalance are pair-level features and enter once at
full weight. Weights default to (0.1, 0.001, 0.1, 1.0, 1.0) for
(RMS, CF, BS, SW, SI).

The style loss compares segment statistics, so its two inputs may have
different lengths (bark-spectrum frames are truncated to the shorter run).
MRSTFT is full-reference and demands identical content and length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioBuffer, mean_energy
from .errors import (
    AudioTooShortError,
    InvalidConfigError,
    SilentAudioError,
    UnsupportedAudioError,
)
from .features import EPSILON, bark_spectrum, stft_magnitude

AF_JSON_KEYS = ("RMS", "CF", "SW", "SI", "BS", "AF_loss")


@dataclass(frozen=True)
class AfLossConfig:
    w_rms: float = 0.1
    w_cf: float = 0.001
    w_bs: float = 0.1
    w_sw: float = 1.0
    w_si: float = 1.0

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if value <= 0:
                raise InvalidConfigError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class MrstftConfig:
    window_sizes: tuple[int, ...] = (512, 2048, 8192)
    epsilon: float = 1e-8

    @property
    def hops(self) -> tuple[int, ...]:
        return tuple(w // 2 for w in self.window_sizes)

    def __post_init__(self) -> None:
        if not self.window_sizes or any(w < 2 for w in self.window_sizes):
            raise InvalidConfigError("window sizes must be >= 2")
        if self.epsilon <= 0:
            raise InvalidConfigError("epsilon must be positive")


@dataclass(frozen=True)
class FeatureDistanceReport:
    """Weighted per-feature squared distances and their sum."""

    rms: float
    cf: float
    sw: float
    si: float
    bs: float
    total: float

    def to_json(self) -> dict[str, float]:
        return {
            "RMS": self.rms,
            "CF": self.cf,
            "SW": self.sw,
            "SI": self.si,
            "BS": self.bs,
            "AF_loss": self.total,
        }


@dataclass(frozen=True)
class StyleFeatures:
    """Extracted per-channel and pair features of one stereo buffer.

    Extracting these once and reusing them is how the optimizer avoids
    re-analysing the (fixed) reference on every objective evaluation.
    """

    channel_rms: tuple[float, float]
    channel_cf: tuple[float, float]
    channel_bs: tuple[np.ndarray, np.ndarray] = field(repr=False)
    width: float = 0.0
    imbalance: float = 0.0


def _guarded_crest_db(x: np.ndarray) -> float:
    # epsilon keeps a silent channel (hard-panned mixes) finite: CF -> 0
    peak = float(np.max(np.abs(x)))
    level = float(np.sqrt(np.mean(np.square(x))))
    return float(20.0 * np.log10((peak + EPSILON) / (level + EPSILON)))


def extract_style_features(buffer: AudioBuffer) -> StyleFeatures:
    """Compute every style-loss feature of a stereo buffer."""
    if not buffer.is_stereo:
        raise UnsupportedAudioError("style features need a stereo buffer")
    if mean_energy(buffer.samples) == 0.0:
        raise SilentAudioError("style features of silence are undefined")
    left, right = buffer.samples
    side = float(np.mean(np.square(left - right)))
    mid = float(np.mean(np.square(left + right)))
    left_e = float(np.mean(np.square(left)))
    right_e = float(np.mean(np.square(right)))
    return StyleFeatures(
        channel_rms=(float(np.sqrt(left_e)), float(np.sqrt(right_e))),
        channel_cf=(_guarded_crest_db(left), _guarded_crest_db(right)),
        channel_bs=(bark_spectrum(left), bark_spectrum(right)),
        width=side / (mid + EPSILON),
        imbalance=(right_e - left_e) / (right_e + left_e + EPSILON),
    )


def _channel_mse(pred: tuple[float, float], ref: tuple[float, float]) -> float:
    return 0.5 * ((pred[0] - ref[0]) ** 2 + (pred[1] - ref[1]) ** 2)


def _bs_mse(pred: np.ndarray, ref: np.ndarray) -> float:
    frames = min(pred.shape[0], ref.shape[0])
    return float(np.mean(np.square(pred[:frames] - ref[:frames])))


def af_report_from_features(
    pred: StyleFeatures, ref: StyleFeatures, cfg: AfLossConfig | None = None
) -> FeatureDistanceReport:
    """Assemble the weighted style loss from pre-extracted features."""
    cfg = cfg or AfLossConfig()
    rms_term = cfg.w_rms * _channel_mse(pred.channel_rms, ref.channel_rms)
    cf_term = cfg.w_cf * _channel_mse(pred.channel_cf, ref.channel_cf)
    bs_term = cfg.w_bs * 0.5 * (
        _bs_mse(pred.channel_bs[0], ref.channel_bs[0])
        + _bs_mse(pred.channel_bs[1], ref.channel_bs[1])
    )
    sw_term = cfg.w_sw * (pred.width - ref.width) ** 2
    si_term = cfg.w_si * (pred.imbalance - ref.imbalance) ** 2
    total = rms_term + cf_term + bs_term + sw_term + si_term
    return FeatureDistanceReport(
        rms=rms_term, cf=cf_term, sw=sw_term, si=si_term, bs=bs_term, total=total
    )


def af_loss(
    pred: AudioBuffer, ref: AudioBuffer, cfg: AfLossConfig | None = None
) -> FeatureDistanceReport:
    """Audio-production style loss between two stereo buffers."""
    return af_report_from_features(
        extract_style_features(pred), extract_style_features(ref), cfg
    )


def stft_magnitudes_multi(
    buffer: AudioBuffer, cfg: MrstftConfig | None = None
) -> list[list[np.ndarray]]:
    """Per-channel, per-resolution magnitude STFTs (cacheable for reuse)."""
    cfg = cfg or MrstftConfig()
    if not buffer.is_stereo:
        raise UnsupportedAudioError("MRSTFT needs stereo buffers")
    largest = max(cfg.window_sizes)
    if buffer.n_samples < largest:
        raise AudioTooShortError(
            f"need at least {largest} samples for the largest STFT window"
        )
    return [
        [
            stft_magnitude(channel, window, window // 2).magnitudes
            for window in cfg.window_sizes
        ]
        for channel in buffer.samples
    ]


def mrstft_from_magnitudes(
    pred_mags: list[list[np.ndarray]],
    ref_mags: list[list[np.ndarray]],
    cfg: MrstftConfig | None = None,
) -> float:
    cfg = cfg or MrstftConfig()
    per_channel = []
    for pred_res, ref_res in zip(pred_mags, ref_mags):
        total = 0.0
        for x, y in zip(pred_res, ref_res):
            total += float(np.mean(np.abs(x - y)))
            total += float(
                np.mean(np.abs(np.log(x + cfg.epsilon) - np.log(y + cfg.epsilon)))
            )
        per_channel.append(total)
    return float(np.mean(per_channel))


def mrstft_loss(
    pred: AudioBuffer, ref: AudioBuffer, cfg: MrstftConfig | None = None
) -> float:
    """Multi-resolution STFT L1 distance, linear + log magnitude.

    Summed over resolutions, averaged over channels. Inputs must be stereo
    with identical lengths (full-reference metric).
    """
    cfg = cfg or MrstftConfig()
    if pred.n_samples != ref.n_samples:
        raise UnsupportedAudioError(
            "MRSTFT is full-reference: inputs must have identical lengths "
            f"(got {pred.n_samples} vs {ref.n_samples})"
        )
    return mrstft_from_magnitudes(
        stft_magnitudes_multi(pred, cfg), stft_magnitudes_multi(ref, cfg), cfg
    )
