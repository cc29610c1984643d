"""Direct search over normalized console parameters.

Stands in for a learned controller: Adam descends the chosen loss between
the rendered mix and a reference, with gradients from central finite
differences or SPSA. The search space is the [0,1] box of
:mod:`mixmatch.params`; every evaluation renders the mix from scratch, so
the objective is a pure function of the parameter vector.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .audio_io import AudioBuffer, MultitrackSet, normalize_loudness
from .console import mix
from .errors import InvalidConfigError, SilentAudioError
from .losses import (
    StyleFeatures,
    af_report_from_features,
    extract_style_features,
    mrstft_from_magnitudes,
    stft_magnitudes_multi,
)
from .params import ConsoleParams, denormalize, identity_vector, params_to_dict

SILENT_MIX_PENALTY = 1e6

# relative improvement of the best loss that counts as progress
IMPROVEMENT_TOL = 1e-4

AF_LOSS = "af"
MRSTFT_LOSS = "mrstft"


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to optimize: tracks, reference, loss kind, and the loudness
    anchor applied to the rendered mix before each loss evaluation."""

    loss_kind: str
    reference: AudioBuffer
    tracks: MultitrackSet
    normalization_target: float = -16.0

    def __post_init__(self) -> None:
        if self.loss_kind not in (AF_LOSS, MRSTFT_LOSS):
            raise InvalidConfigError(f"unknown loss kind {self.loss_kind!r}")
        if not self.reference.is_stereo:
            raise InvalidConfigError("reference must be stereo")
        if self.loss_kind == MRSTFT_LOSS and (
            self.reference.n_samples != self.tracks.n_samples
        ):
            raise InvalidConfigError(
                "mrstft is full-reference: reference length must equal track length"
            )


@dataclass(frozen=True)
class OptimizerConfig:
    grad_mode: str = "spsa"  # "fd" | "spsa"
    fd_step: float = 1e-3
    spsa_step: float = 1e-2
    spsa_averages: int = 2
    lr: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    max_iters: int = 300
    patience: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grad_mode not in ("fd", "spsa"):
            raise InvalidConfigError(f"unknown grad mode {self.grad_mode!r}")
        for name in ("fd_step", "spsa_step", "lr", "beta1", "beta2", "adam_eps"):
            if getattr(self, name) <= 0:
                raise InvalidConfigError(f"{name} must be positive")
        if self.fd_step >= 0.5:
            raise InvalidConfigError("fd_step must stay below half the unit box")
        if self.spsa_averages < 1:
            raise InvalidConfigError("spsa_averages must be at least 1")
        if self.max_iters < 0 or self.patience < 0:
            raise InvalidConfigError("max_iters and patience cannot be negative")


@dataclass(frozen=True)
class OptimizationReport:
    """Loss trace plus the best parameters seen and reproducibility metadata."""

    loss_trace: list[float]
    best_params: ConsoleParams
    best_loss: float
    iterations_run: int
    wall_time: float
    loss_kind: str = AF_LOSS
    grad_mode: str = "spsa"
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "loss_trace": [float(v) for v in self.loss_trace],
            "best_loss": float(self.best_loss),
            "iterations_run": self.iterations_run,
            "wall_time_s": float(self.wall_time),
            "loss_kind": self.loss_kind,
            "grad_mode": self.grad_mode,
            "seed": self.seed,
            "best_params": params_to_dict(self.best_params),
        }


class PreparedObjective:
    """Callable objective with the reference analysed once up front."""

    def __init__(self, spec: ObjectiveSpec):
        self.spec = spec
        self.n_tracks = spec.tracks.n_tracks
        self._ref = normalize_loudness(spec.reference, spec.normalization_target)
        self._ref_features: StyleFeatures | None = None
        self._ref_mags: list[list[np.ndarray]] | None = None
        if spec.loss_kind == AF_LOSS:
            self._ref_features = extract_style_features(self._ref)
        else:
            self._ref_mags = stft_magnitudes_multi(self._ref)

    def render(self, v: np.ndarray) -> AudioBuffer:
        return mix(self.spec.tracks, denormalize(v, self.n_tracks))

    def __call__(self, v: np.ndarray) -> float:
        rendered = self.render(v)
        try:
            normalized = normalize_loudness(rendered, self.spec.normalization_target)
        except SilentAudioError:
            return SILENT_MIX_PENALTY
        if self.spec.loss_kind == AF_LOSS:
            value = af_report_from_features(
                extract_style_features(normalized), self._ref_features
            ).total
        else:
            value = mrstft_from_magnitudes(
                stft_magnitudes_multi(normalized), self._ref_mags
            )
        if not math.isfinite(value):
            return SILENT_MIX_PENALTY
        return float(value)


Objective = Union[ObjectiveSpec, PreparedObjective, Callable[[np.ndarray], float]]


def _as_callable(objective: Objective) -> Callable[[np.ndarray], float]:
    if isinstance(objective, ObjectiveSpec):
        return PreparedObjective(objective)
    return objective


def objective_eval(v: np.ndarray, spec: Objective) -> float:
    """Render, loudness-normalize, and score one parameter vector."""
    return _as_callable(spec)(np.asarray(v, dtype=np.float64))


def fd_gradient(v: np.ndarray, objective: Objective, fd_step: float = 1e-3) -> np.ndarray:
    """Central-difference gradient, one-sided at the box bounds."""
    f = _as_callable(objective)
    v = np.asarray(v, dtype=np.float64)
    grad = np.zeros_like(v)
    for i in range(len(v)):
        up = min(fd_step, 1.0 - v[i])
        down = min(fd_step, v[i])
        if up + down == 0.0:
            continue
        forward = v.copy()
        forward[i] += up
        backward = v.copy()
        backward[i] -= down
        grad[i] = (f(forward) - f(backward)) / (up + down)
    return grad


def spsa_gradient(
    v: np.ndarray,
    objective: Objective,
    rng: np.random.Generator,
    step: float = 1e-2,
    averages: int = 1,
) -> np.ndarray:
    """Simultaneous-perturbation gradient estimate, averaged over draws.

    Each draw perturbs every coordinate at once along a Rademacher
    direction and spends two objective evaluations; perturbed points are
    clipped back into the unit box.
    """
    if averages < 1:
        raise InvalidConfigError("spsa averages must be at least 1")
    f = _as_callable(objective)
    v = np.asarray(v, dtype=np.float64)
    grad = np.zeros_like(v)
    for _ in range(averages):
        delta = rng.integers(0, 2, size=len(v)) * 2.0 - 1.0
        up = np.clip(v + step * delta, 0.0, 1.0)
        down = np.clip(v - step * delta, 0.0, 1.0)
        grad += (f(up) - f(down)) / (2.0 * step) * delta
    return grad / averages


def minimize_with_adam(
    objective: Objective,
    v0: np.ndarray,
    cfg: OptimizerConfig,
    rng: np.random.Generator | None = None,
) -> tuple[list[float], np.ndarray, float, int]:
    """Adam descent in the unit box; returns (trace, best_v, best_loss, steps).

    The trace holds the objective value at the start point and after every
    step. The search stops early once `patience` consecutive steps fail to
    improve the best loss by a relative 1e-4.
    """
    f = _as_callable(objective)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    v = np.clip(np.asarray(v0, dtype=np.float64), 0.0, 1.0)
    best_v = v.copy()
    best = f(v)
    trace = [best]
    m = np.zeros_like(v)
    s = np.zeros_like(v)
    stall = 0
    steps = 0
    for t in range(1, cfg.max_iters + 1):
        if cfg.grad_mode == "fd":
            g = fd_gradient(v, f, cfg.fd_step)
        else:
            g = spsa_gradient(v, f, rng, cfg.spsa_step, cfg.spsa_averages)
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        s = cfg.beta2 * s + (1.0 - cfg.beta2) * np.square(g)
        m_hat = m / (1.0 - cfg.beta1**t)
        s_hat = s / (1.0 - cfg.beta2**t)
        v = np.clip(v - cfg.lr * m_hat / (np.sqrt(s_hat) + cfg.adam_eps), 0.0, 1.0)
        loss = f(v)
        trace.append(loss)
        steps = t
        improvement = (best - loss) / max(abs(best), 1e-12)
        if loss < best:
            best = loss
            best_v = v.copy()
        if improvement >= IMPROVEMENT_TOL:
            stall = 0
        else:
            stall += 1
            if cfg.patience and stall >= cfg.patience:
                break
    return trace, best_v, best, steps


def match_style(
    tracks: MultitrackSet,
    reference: AudioBuffer,
    cfg: OptimizerConfig | None = None,
    loss_kind: str = AF_LOSS,
    normalization_target: float = -16.0,
) -> OptimizationReport:
    """Estimate console parameters whose mix matches the reference's style.

    Starts from the neutral console (an audible, uncolored mix) rather than
    a random point, which risks landing on the silent-mix penalty plateau.
    """
    cfg = cfg or OptimizerConfig()
    spec = ObjectiveSpec(
        loss_kind=loss_kind,
        reference=reference,
        tracks=tracks,
        normalization_target=normalization_target,
    )
    prepared = PreparedObjective(spec)
    start = time.perf_counter()
    trace, best_v, best_loss, steps = minimize_with_adam(
        prepared, identity_vector(tracks.n_tracks), cfg
    )
    wall = time.perf_counter() - start
    return OptimizationReport(
        loss_trace=trace,
        best_params=denormalize(best_v, tracks.n_tracks),
        best_loss=best_loss,
        iterations_run=steps,
        wall_time=wall,
        loss_kind=loss_kind,
        grad_mode=cfg.grad_mode,
        seed=cfg.seed,
    )


def equal_loudness_mix(tracks: MultitrackSet) -> AudioBuffer:
    """Style-blind anchor: mean of -48 dBFS tracks, duplicated to stereo,
    normalized to -16 dBFS.

    A track that happens to be silent (possible when mixing a slice of a
    longer session) cannot be leveled, so it joins the mean as zeros.
    """
    leveled = []
    for track in tracks.tracks:
        try:
            leveled.append(normalize_loudness(track, -48.0).samples[0])
        except SilentAudioError:
            leveled.append(np.zeros(track.n_samples))
    mono = np.mean(leveled, axis=0)
    stereo = AudioBuffer(np.stack([mono, mono]))
    return normalize_loudness(stereo, -16.0)
