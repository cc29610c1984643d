import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mixmatch.audio_io import SAMPLE_RATE, AudioBuffer, MultitrackSet, write_wav


def sine(freq: float, seconds: float, amp: float = 0.5, phase: float = 0.0) -> np.ndarray:
    t = np.arange(int(round(seconds * SAMPLE_RATE))) / SAMPLE_RATE
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def sawtooth(freq: float, seconds: float, amp: float = 0.5) -> np.ndarray:
    t = np.arange(int(round(seconds * SAMPLE_RATE))) / SAMPLE_RATE
    return amp * (2.0 * ((freq * t) % 1.0) - 1.0)


def noise(seconds: float, amp: float = 0.2, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return amp * rng.standard_normal(int(round(seconds * SAMPLE_RATE)))


def pulse_train(freq: float, seconds: float, amp: float = 0.8, duty: float = 0.02) -> np.ndarray:
    n = int(round(seconds * SAMPLE_RATE))
    period = int(SAMPLE_RATE / freq)
    out = np.zeros(n)
    width = max(1, int(period * duty))
    for start in range(0, n, period):
        stop = min(n, start + width)
        out[start:stop] = amp * np.exp(-np.arange(stop - start) / (width / 3.0 + 1.0))
    return out


def random_stereo(rng: np.random.Generator, seconds: float = 0.08) -> AudioBuffer:
    n = int(round(seconds * SAMPLE_RATE))
    base = rng.standard_normal(n) * rng.uniform(0.05, 0.4)
    spread = rng.standard_normal(n) * rng.uniform(0.0, 0.2)
    left = base + spread * rng.uniform(0.0, 1.0)
    right = base * rng.uniform(0.3, 1.2) - spread * rng.uniform(0.0, 1.0)
    return AudioBuffer(np.stack([left, right]))


def synth_tracks(seconds: float, n_tracks: int = 4, seed: int = 7) -> MultitrackSet:
    rng = np.random.default_rng(seed)
    makers = [
        lambda: sine(float(rng.uniform(60, 200)), seconds, float(rng.uniform(0.2, 0.7))),
        lambda: sawtooth(float(rng.uniform(200, 800)), seconds, float(rng.uniform(0.1, 0.5))),
        lambda: noise(seconds, float(rng.uniform(0.05, 0.3)), int(rng.integers(1 << 30))),
        lambda: pulse_train(float(rng.uniform(2, 8)), seconds, float(rng.uniform(0.4, 0.9))),
    ]
    tracks = [AudioBuffer(makers[i % len(makers)]()) for i in range(n_tracks)]
    return MultitrackSet(tracks, [f"synth{i}.wav" for i in range(n_tracks)])


def write_corpus(directory: Path, seconds: float = 12.0) -> Path:
    """A small synthetic session: six mono sources plus one stereo pad.

    Sources are statistically stationary (dense pulses, fast tremolo) so any
    two halves of a segment share the same style features; slow modulation
    would make self-supervised halves drift apart.
    """
    directory.mkdir(parents=True, exist_ok=True)
    write_wav(AudioBuffer(sine(82.4, seconds, 0.6)), directory / "bass.wav")
    write_wav(AudioBuffer(sawtooth(440.0, seconds, 0.35)), directory / "lead.wav")
    write_wav(
        AudioBuffer(sine(220.0, seconds, 0.3) + sine(277.2, seconds, 0.25) + sine(329.6, seconds, 0.2)),
        directory / "keys.wav",
    )
    write_wav(AudioBuffer(noise(seconds, 0.18, seed=11)), directory / "hats.wav")
    write_wav(AudioBuffer(pulse_train(5.0, seconds, 0.9)), directory / "kick.wav")
    write_wav(AudioBuffer(sine(660.0, seconds, 0.25) * (1.0 + 0.5 * sine(6.0, seconds, 1.0))), directory / "arp.wav")
    pad = np.stack([sine(110.0, seconds, 0.3), sine(138.6, seconds, 0.3)])
    write_wav(AudioBuffer(pad), directory / "pad.wav")
    return directory


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Twelve-second synthetic multitrack session (8 mono tracks once split)."""
    return write_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture(scope="session")
def short_corpus_dir(tmp_path_factory) -> Path:
    """Four-second session for fast CLI and experiment tests."""
    return write_corpus(tmp_path_factory.mktemp("short_corpus"), seconds=4.0)
