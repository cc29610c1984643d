"""Console parameter model and its normalized [0,1] search-space mapping.

A channel strip carries 18 scalars (gain, 4 EQ bands, compressor, pan) and
the master bus 16 (EQ + compressor, no gain/pan), so a console for N tracks
flattens to 18*N + 16 values. The flat layout is fixed and documented by
:func:`param_ranges`; frequencies, Q, compressor time constants, and ratio
map logarithmically onto [0,1], everything else linearly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ParamRangeError

LOW_SHELF = "low_shelf"
PEAK = "peak"
HIGH_SHELF = "high_shelf"

SHELF_Q = 1.0 / math.sqrt(2.0)

PARAMS_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ParamSpec:
    """One scalar parameter: its layout name, legal range, and [0,1] mapping."""

    name: str
    minimum: float
    maximum: float
    scale: str  # "linear" | "log"

    def to_unit(self, value: float) -> float:
        if self.scale == "log":
            return (math.log(value) - math.log(self.minimum)) / (
                math.log(self.maximum) - math.log(self.minimum)
            )
        return (value - self.minimum) / (self.maximum - self.minimum)

    def from_unit(self, unit: float) -> float:
        if self.scale == "log":
            return math.exp(
                math.log(self.minimum)
                + unit * (math.log(self.maximum) - math.log(self.minimum))
            )
        return self.minimum + unit * (self.maximum - self.minimum)

    def validate(self, value: float) -> None:
        # tiny tolerance absorbs round-tripping through the unit interval
        span = abs(self.maximum - self.minimum)
        if not (self.minimum - 1e-9 * span <= value <= self.maximum + 1e-9 * span):
            raise ParamRangeError(
                f"{self.name}={value} outside [{self.minimum}, {self.maximum}]"
            )


def _eq_layout() -> list[ParamSpec]:
    return [
        ParamSpec("eq.low_shelf.center_hz", 20.0, 500.0, "log"),
        ParamSpec("eq.low_shelf.gain_db", -18.0, 18.0, "linear"),
        ParamSpec("eq.peak1.center_hz", 200.0, 5000.0, "log"),
        ParamSpec("eq.peak1.gain_db", -18.0, 18.0, "linear"),
        ParamSpec("eq.peak1.q", 0.3, 6.0, "log"),
        ParamSpec("eq.peak2.center_hz", 500.0, 10000.0, "log"),
        ParamSpec("eq.peak2.gain_db", -18.0, 18.0, "linear"),
        ParamSpec("eq.peak2.q", 0.3, 6.0, "log"),
        ParamSpec("eq.high_shelf.center_hz", 1500.0, 16000.0, "log"),
        ParamSpec("eq.high_shelf.gain_db", -18.0, 18.0, "linear"),
    ]


def _comp_layout() -> list[ParamSpec]:
    return [
        ParamSpec("comp.threshold_db", -60.0, 0.0, "linear"),
        ParamSpec("comp.ratio", 1.0, 20.0, "log"),
        ParamSpec("comp.attack_ms", 1.0, 100.0, "log"),
        ParamSpec("comp.release_ms", 10.0, 1000.0, "log"),
        ParamSpec("comp.knee_db", 0.0, 12.0, "linear"),
        ParamSpec("comp.makeup_db", 0.0, 12.0, "linear"),
    ]


STRIP_LAYOUT: tuple[ParamSpec, ...] = tuple(
    [ParamSpec("gain_db", -24.0, 24.0, "linear")]
    + _eq_layout()
    + _comp_layout()
    + [ParamSpec("pan", 0.0, 1.0, "linear")]
)

MASTER_LAYOUT: tuple[ParamSpec, ...] = tuple(_eq_layout() + _comp_layout())

STRIP_PARAM_COUNT = len(STRIP_LAYOUT)  # 18
MASTER_PARAM_COUNT = len(MASTER_LAYOUT)  # 16


def vector_length(n_tracks: int) -> int:
    return STRIP_PARAM_COUNT * n_tracks + MASTER_PARAM_COUNT


def param_ranges(n_tracks: int = 1) -> list[ParamSpec]:
    """Canonical flat layout: strip 0 .. strip N-1, then the master bus."""
    layout: list[ParamSpec] = []
    for i in range(n_tracks):
        for spec in STRIP_LAYOUT:
            layout.append(
                ParamSpec(f"track{i}.{spec.name}", spec.minimum, spec.maximum, spec.scale)
            )
    for spec in MASTER_LAYOUT:
        layout.append(
            ParamSpec(f"master.{spec.name}", spec.minimum, spec.maximum, spec.scale)
        )
    return layout


@dataclass(frozen=True)
class EqBandParams:
    kind: str  # low_shelf | peak | high_shelf
    center_hz: float
    gain_db: float
    q: float = SHELF_Q

    def __post_init__(self) -> None:
        if self.kind not in (LOW_SHELF, PEAK, HIGH_SHELF):
            raise ParamRangeError(f"unknown EQ band kind {self.kind!r}")


@dataclass(frozen=True)
class CompressorParams:
    threshold_db: float
    ratio: float
    attack_ms: float
    release_ms: float
    knee_db: float
    makeup_db: float


@dataclass(frozen=True)
class ChannelStripParams:
    gain_db: float
    eq: tuple[EqBandParams, EqBandParams, EqBandParams, EqBandParams]
    comp: CompressorParams
    pan: float


@dataclass(frozen=True)
class MasterBusParams:
    eq: tuple[EqBandParams, EqBandParams, EqBandParams, EqBandParams]
    comp: CompressorParams


@dataclass(frozen=True)
class ConsoleParams:
    strips: tuple[ChannelStripParams, ...]
    master: MasterBusParams

    @property
    def n_tracks(self) -> int:
        return len(self.strips)


_BAND_KINDS = (LOW_SHELF, PEAK, PEAK, HIGH_SHELF)


def _values_to_eq(values: Iterator[float]) -> tuple[EqBandParams, ...]:
    bands = []
    for kind in _BAND_KINDS:
        fc = next(values)
        gain = next(values)
        q = next(values) if kind == PEAK else SHELF_Q
        bands.append(EqBandParams(kind, fc, gain, q))
    return tuple(bands)


def _values_to_comp(values: Iterator[float]) -> CompressorParams:
    return CompressorParams(
        threshold_db=next(values),
        ratio=next(values),
        attack_ms=next(values),
        release_ms=next(values),
        knee_db=next(values),
        makeup_db=next(values),
    )


def _eq_values(eq: tuple[EqBandParams, ...]) -> list[float]:
    out: list[float] = []
    for band in eq:
        out.append(band.center_hz)
        out.append(band.gain_db)
        if band.kind == PEAK:
            out.append(band.q)
    return out


def _comp_values(comp: CompressorParams) -> list[float]:
    return [
        comp.threshold_db,
        comp.ratio,
        comp.attack_ms,
        comp.release_ms,
        comp.knee_db,
        comp.makeup_db,
    ]


def _strip_values(strip: ChannelStripParams) -> list[float]:
    return [strip.gain_db] + _eq_values(strip.eq) + _comp_values(strip.comp) + [strip.pan]


def params_to_values(params: ConsoleParams) -> np.ndarray:
    """Flatten console params into real (denormalized) layout order."""
    values: list[float] = []
    for strip in params.strips:
        values.extend(_strip_values(strip))
    values.extend(_eq_values(params.master.eq))
    values.extend(_comp_values(params.master.comp))
    return np.asarray(values, dtype=np.float64)


def values_to_params(values: np.ndarray, n_tracks: int) -> ConsoleParams:
    """Rebuild console params from real values in layout order."""
    expected = vector_length(n_tracks)
    if len(values) != expected:
        raise ParamRangeError(
            f"expected {expected} values for {n_tracks} tracks, got {len(values)}"
        )
    it = iter(float(v) for v in values)
    strips = []
    for _ in range(n_tracks):
        gain = next(it)
        eq = _values_to_eq(it)
        comp = _values_to_comp(it)
        pan = next(it)
        strips.append(ChannelStripParams(gain, eq, comp, pan))
    master = MasterBusParams(_values_to_eq(it), _values_to_comp(it))
    return ConsoleParams(tuple(strips), master)


def denormalize(vector: np.ndarray, n_tracks: int) -> ConsoleParams:
    """Map a [0,1] vector onto console parameters per the canonical layout."""
    vector = np.asarray(vector, dtype=np.float64)
    expected = vector_length(n_tracks)
    if vector.shape != (expected,):
        raise ParamRangeError(
            f"expected a vector of length {expected} for {n_tracks} tracks, "
            f"got shape {vector.shape}"
        )
    if np.any(vector < 0.0) or np.any(vector > 1.0):
        raise ParamRangeError("normalized values must lie in [0, 1]")
    layout = param_ranges(n_tracks)
    values = np.array(
        [spec.from_unit(v) for spec, v in zip(layout, vector)], dtype=np.float64
    )
    return values_to_params(values, n_tracks)


def normalize(params: ConsoleParams) -> np.ndarray:
    """Inverse of :func:`denormalize`; validates every value against its range."""
    layout = param_ranges(params.n_tracks)
    values = params_to_values(params)
    out = np.empty(len(values), dtype=np.float64)
    for i, (spec, value) in enumerate(zip(layout, values)):
        spec.validate(value)
        out[i] = min(1.0, max(0.0, spec.to_unit(value)))
    return out


def identity_vector(n_tracks: int) -> np.ndarray:
    """Normalized vector of the neutral console: unity gain, flat EQ, no
    compression (ratio 1, threshold 0 dB), centered pans."""
    identity = {
        "gain_db": 0.5,
        "eq.low_shelf.center_hz": 0.5,
        "eq.low_shelf.gain_db": 0.5,
        "eq.peak1.center_hz": 0.5,
        "eq.peak1.gain_db": 0.5,
        "eq.peak1.q": 0.5,
        "eq.peak2.center_hz": 0.5,
        "eq.peak2.gain_db": 0.5,
        "eq.peak2.q": 0.5,
        "eq.high_shelf.center_hz": 0.5,
        "eq.high_shelf.gain_db": 0.5,
        "comp.threshold_db": 1.0,
        "comp.ratio": 0.0,
        "comp.attack_ms": 0.5,
        "comp.release_ms": 0.5,
        "comp.knee_db": 0.0,
        "comp.makeup_db": 0.0,
        "pan": 0.5,
    }
    strip = [identity[spec.name] for spec in STRIP_LAYOUT]
    master = [identity[spec.name] for spec in MASTER_LAYOUT]
    return np.asarray(strip * n_tracks + master, dtype=np.float64)


def identity_params(n_tracks: int) -> ConsoleParams:
    return denormalize(identity_vector(n_tracks), n_tracks)


def sample_random_params(n_tracks: int, seed: int) -> ConsoleParams:
    """Draw every normalized parameter uniformly in [0,1], then denormalize."""
    if n_tracks < 1:
        raise ParamRangeError("need at least one track")
    rng = np.random.default_rng(seed)
    vector = rng.uniform(0.0, 1.0, size=vector_length(n_tracks))
    return denormalize(vector, n_tracks)


def _group_to_dict(layout: tuple[ParamSpec, ...], values: list[float]) -> dict[str, float]:
    return {spec.name: value for spec, value in zip(layout, values)}


def params_to_dict(params: ConsoleParams) -> dict:
    """Versioned JSON-ready form; field names match the layout names."""
    tracks = [
        _group_to_dict(STRIP_LAYOUT, _strip_values(strip)) for strip in params.strips
    ]
    master_values = _eq_values(params.master.eq) + _comp_values(params.master.comp)
    return {
        "version": PARAMS_SCHEMA_VERSION,
        "tracks": tracks,
        "master": _group_to_dict(MASTER_LAYOUT, master_values),
    }


def _dict_to_values(layout: tuple[ParamSpec, ...], data: dict, where: str) -> list[float]:
    values = []
    for spec in layout:
        if spec.name not in data:
            raise ParamRangeError(f"{where} is missing field {spec.name!r}")
        value = float(data[spec.name])
        spec.validate(value)
        values.append(value)
    return values


def params_from_dict(data: dict) -> ConsoleParams:
    """Parse and range-check the JSON form produced by :func:`params_to_dict`."""
    if data.get("version") != PARAMS_SCHEMA_VERSION:
        raise ParamRangeError(
            f"unsupported params schema version {data.get('version')!r}"
        )
    if not data.get("tracks"):
        raise ParamRangeError("params document has no tracks")
    flat: list[float] = []
    for i, track in enumerate(data["tracks"]):
        flat.extend(_dict_to_values(STRIP_LAYOUT, track, f"tracks[{i}]"))
    flat.extend(_dict_to_values(MASTER_LAYOUT, data.get("master", {}), "master"))
    return values_to_params(np.asarray(flat), len(data["tracks"]))


def save_params(params: ConsoleParams, path: str | Path) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), indent=2) + "\n")


def load_params(path: str | Path) -> ConsoleParams:
    return params_from_dict(json.loads(Path(path).read_text()))
