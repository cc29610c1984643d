"""Self-supervised experiment harness and mix evaluation.

The self-supervised protocol builds pseudo ground truth without any labeled
data: take an active segment of a multitrack session, render it through a
console with random parameters, and split both the random mix and the
tracks in half. The first mix half (A) serves as the style reference, the
second-half tracks are the optimization input, and the second mix half (B)
is the held-out ground truth produced by the very same parameters.

Evaluation follows a fixed loudness convention: the reference is anchored
at -16 dBFS and the mix under test at -22 dBFS before any metric runs.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .audio_io import (
    ACTIVE_ENERGY_THRESHOLD,
    SAMPLE_RATE,
    AudioBuffer,
    MultitrackSet,
    find_active_segment,
    load_multitrack,
    mean_energy,
    normalize_loudness,
    read_wav,
)
from .console import mix
from .errors import NoActiveSegmentError, SilentAudioError, UnsupportedAudioError
from .losses import FeatureDistanceReport, af_loss, mrstft_loss
from .optimize import (
    OptimizationReport,
    OptimizerConfig,
    equal_loudness_mix,
    match_style,
)
from .params import ConsoleParams, sample_random_params

log = logging.getLogger(__name__)

REFERENCE_TARGET_DBFS = -16.0
PREDICTED_TARGET_DBFS = -22.0

_RENDER_RETRIES = 20

METHOD1_CSV_COLUMNS = (
    "seed",
    "loss_kind",
    "init_loss",
    "final_loss",
    "baseline_loss",
    "mrstft_vs_gt",
    "af_vs_gt",
)


@dataclass(frozen=True)
class Method1Example:
    """One self-supervised example: reference half A, ground-truth half B."""

    tracks_b: MultitrackSet
    reference_a: AudioBuffer
    ground_truth_b: AudioBuffer
    true_params: ConsoleParams
    seed: int


@dataclass(frozen=True)
class EvalReport:
    """Style metrics of one mix against a reference, after leveling both."""

    features: FeatureDistanceReport
    reference_target_dbfs: float = REFERENCE_TARGET_DBFS
    predicted_target_dbfs: float = PREDICTED_TARGET_DBFS
    mrstft: float | None = None

    def to_json(self) -> dict:
        data: dict = dict(self.features.to_json())
        data["normalization"] = {
            "reference_dbfs": self.reference_target_dbfs,
            "predicted_dbfs": self.predicted_target_dbfs,
        }
        if self.mrstft is not None:
            data["mrstft"] = self.mrstft
        return data


@dataclass(frozen=True)
class Method1Row:
    seed: int
    loss_kind: str
    init_loss: float
    final_loss: float
    baseline_loss: float
    mrstft_vs_gt: float
    af_vs_gt: float
    report: OptimizationReport = field(repr=False, compare=False)

    def csv_values(self) -> dict:
        return {
            "seed": self.seed,
            "loss_kind": self.loss_kind,
            "init_loss": repr(self.init_loss),
            "final_loss": repr(self.final_loss),
            "baseline_loss": repr(self.baseline_loss),
            "mrstft_vs_gt": repr(self.mrstft_vs_gt),
            "af_vs_gt": repr(self.af_vs_gt),
        }

    @property
    def relative_reduction(self) -> float:
        if self.init_loss == 0.0:
            return 0.0
        return (self.init_loss - self.final_loss) / self.init_loss


@dataclass(frozen=True)
class Method1Summary:
    rows: list[Method1Row]

    def medians(self) -> dict[str, float]:
        return {
            "init_loss": float(np.median([r.init_loss for r in self.rows])),
            "final_loss": float(np.median([r.final_loss for r in self.rows])),
            "baseline_loss": float(np.median([r.baseline_loss for r in self.rows])),
            "mrstft_vs_gt": float(np.median([r.mrstft_vs_gt for r in self.rows])),
            "af_vs_gt": float(np.median([r.af_vs_gt for r in self.rows])),
            "relative_reduction": float(
                np.median([r.relative_reduction for r in self.rows])
            ),
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=METHOD1_CSV_COLUMNS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow(row.csv_values())


def generate_method1_example(
    track_dir: str | Path,
    seed: int,
    segment_seconds: float = 10.0,
    max_tracks: int | None = 16,
) -> Method1Example:
    """Build one self-supervised example from a directory of raw tracks.

    Loads the session (-48 dBFS mono tracks), picks an active segment by
    scanning a -16 dBFS rough mono mix against the 1e-3 energy threshold,
    renders the segment through random console parameters, normalizes the
    random mix to -16 dBFS, and splits everything in half. Parameter draws
    whose mix is silent or leaves either half under the energy threshold
    are rejected and resampled, up to 20 attempts.
    """
    tracks = load_multitrack(track_dir, max_tracks=max_tracks, seed=seed)
    segment_len = 2 * (int(round(segment_seconds * SAMPLE_RATE)) // 2)
    half = segment_len // 2

    rng = np.random.default_rng(seed)
    rough = AudioBuffer(np.mean([t.samples[0] for t in tracks.tracks], axis=0))
    rough = normalize_loudness(rough, REFERENCE_TARGET_DBFS)
    offset = find_active_segment(rough, segment_len, int(rng.integers(2**31)))
    segment = tracks.slice(offset, offset + segment_len)

    whole: AudioBuffer | None = None
    true_params: ConsoleParams | None = None
    for _ in range(_RENDER_RETRIES):
        candidate = sample_random_params(tracks.n_tracks, int(rng.integers(2**31)))
        rendered = mix(segment, candidate)
        try:
            leveled = normalize_loudness(rendered, REFERENCE_TARGET_DBFS)
        except SilentAudioError:
            continue
        halves_active = all(
            mean_energy(leveled.samples[:, lo:hi]) >= ACTIVE_ENERGY_THRESHOLD
            for lo, hi in ((0, half), (half, segment_len))
        )
        if halves_active:
            whole = leveled
            true_params = candidate
            break
    if whole is None or true_params is None:
        raise NoActiveSegmentError(
            f"no random console draw produced an active mix in {_RENDER_RETRIES} attempts"
        )

    return Method1Example(
        tracks_b=segment.slice(half, segment_len),
        reference_a=normalize_loudness(whole.slice(0, half), REFERENCE_TARGET_DBFS),
        ground_truth_b=whole.slice(half, segment_len),
        true_params=true_params,
        seed=seed,
    )


def evaluate_buffers(pred: AudioBuffer, ref: AudioBuffer) -> EvalReport:
    """Score a mix against a reference under the evaluation loudness anchors.

    MRSTFT is included only when the two buffers carry the same content
    length; the style features never need that.
    """
    if not pred.is_stereo or not ref.is_stereo:
        raise UnsupportedAudioError("evaluation needs stereo mixes")
    ref_n = normalize_loudness(ref, REFERENCE_TARGET_DBFS)
    pred_n = normalize_loudness(pred, PREDICTED_TARGET_DBFS)
    features = af_loss(pred_n, ref_n)
    mrstft = (
        mrstft_loss(pred_n, ref_n) if pred_n.n_samples == ref_n.n_samples else None
    )
    return EvalReport(features=features, mrstft=mrstft)


def evaluate_mix(pred_path: str | Path, ref_path: str | Path) -> EvalReport:
    """Score a mix WAV against a reference WAV."""
    return evaluate_buffers(read_wav(pred_path), read_wav(ref_path))


def run_method1_experiment(
    track_dir: str | Path,
    seeds: list[int],
    cfg: OptimizerConfig | None = None,
    loss_kind: str = "af",
    segment_seconds: float = 10.0,
    max_tracks: int | None = 16,
) -> Method1Summary:
    """Run the self-supervised protocol over several seeds.

    Per seed: generate an example, optimize the second-half tracks against
    reference half A, then score the optimized mix and the equal-loudness
    anchor against ground-truth half B. The optimizer seed is tied to the
    example seed so a rerun reproduces every row bit for bit.
    """
    cfg = cfg or OptimizerConfig()
    rows = []
    for seed in seeds:
        example = generate_method1_example(
            track_dir, seed, segment_seconds=segment_seconds, max_tracks=max_tracks
        )
        report = match_style(
            example.tracks_b,
            example.reference_a,
            cfg=replace(cfg, seed=seed),
            loss_kind=loss_kind,
        )
        optimized = mix(example.tracks_b, report.best_params)
        opt_eval = evaluate_buffers(optimized, example.ground_truth_b)
        base_eval = evaluate_buffers(
            equal_loudness_mix(example.tracks_b), example.ground_truth_b
        )
        row = Method1Row(
            seed=seed,
            loss_kind=loss_kind,
            init_loss=report.loss_trace[0],
            final_loss=report.best_loss,
            baseline_loss=base_eval.features.total,
            mrstft_vs_gt=opt_eval.mrstft if opt_eval.mrstft is not None else math.nan,
            af_vs_gt=opt_eval.features.total,
            report=report,
        )
        log.info(
            "seed %d: loss %.5f -> %.5f (%.0f%% down), vs ground truth af=%.5f "
            "baseline=%.5f",
            seed,
            row.init_loss,
            row.final_loss,
            100 * row.relative_reduction,
            row.af_vs_gt,
            row.baseline_loss,
        )
        rows.append(row)
    return Method1Summary(rows)
