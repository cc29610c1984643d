import numpy as np
import pytest

from conftest import sine, synth_tracks
from mixmatch.audio_io import SAMPLE_RATE, AudioBuffer, MultitrackSet
from mixmatch.console import (
    apply_compressor,
    apply_eq,
    apply_gain,
    apply_pan,
    design_biquad,
    mix,
    process_channel_strip,
)
from mixmatch.errors import ParamRangeError, UnsupportedAudioError
from mixmatch.params import (
    CompressorParams,
    EqBandParams,
    identity_params,
    sample_random_params,
)
from oracles import biquad_magnitude_at, compressor_static_gain_db

CENTER_GAIN = np.sqrt(2.0) / 2.0


def flat_eq():
    return (
        EqBandParams("low_shelf", 100.0, 0.0),
        EqBandParams("peak", 1000.0, 0.0, 1.0),
        EqBandParams("peak", 3000.0, 0.0, 1.0),
        EqBandParams("high_shelf", 8000.0, 0.0),
    )


def unity_comp(**overrides):
    base = dict(
        threshold_db=0.0, ratio=1.0, attack_ms=5.0, release_ms=100.0,
        knee_db=0.0, makeup_db=0.0,
    )
    base.update(overrides)
    return CompressorParams(**base)


# ---------------------------------------------------------------- gain


def test_gain_zero_is_identity():
    buf = AudioBuffer(sine(440, 0.05))
    np.testing.assert_array_equal(apply_gain(buf, 0.0).samples, buf.samples)


def test_gain_six_db_doubles():
    buf = AudioBuffer(sine(440, 0.05))
    np.testing.assert_allclose(apply_gain(buf, 6.0206).samples, 2.0 * buf.samples, rtol=1e-6)


def test_gain_minus24_on_impulse():
    impulse = np.zeros(100)
    impulse[0] = 1.0
    out = apply_gain(AudioBuffer(impulse), -24.0)
    assert np.max(np.abs(out.samples)) == pytest.approx(10 ** (-1.2))


def test_gain_linearity():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(500)
    b = rng.standard_normal(500)
    lhs = apply_gain(AudioBuffer(a + b), 7.3).samples
    rhs = apply_gain(AudioBuffer(a), 7.3).samples + apply_gain(AudioBuffer(b), 7.3).samples
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------- biquads


def test_unity_peak_coefficients_are_identity():
    coeffs = design_biquad(EqBandParams("peak", 1000.0, 0.0, 1.0), SAMPLE_RATE)
    np.testing.assert_allclose(coeffs, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_low_shelf_dc_gain():
    coeffs = design_biquad(EqBandParams("low_shelf", 100.0, 6.0), SAMPLE_RATE)
    assert biquad_magnitude_at(coeffs, 1.0 + 0j) == pytest.approx(10 ** (6 / 20), abs=1e-3)


def test_high_shelf_nyquist_gain():
    coeffs = design_biquad(EqBandParams("high_shelf", 8000.0, -6.0), SAMPLE_RATE)
    assert biquad_magnitude_at(coeffs, -1.0 + 0j) == pytest.approx(10 ** (-6 / 20), abs=1e-3)


def test_peak_center_gain():
    coeffs = design_biquad(EqBandParams("peak", 1000.0, 12.0, 2.0), SAMPLE_RATE)
    z = np.exp(2j * np.pi * 1000.0 / SAMPLE_RATE)
    assert biquad_magnitude_at(coeffs, z) == pytest.approx(10 ** (12 / 20), rel=1e-3)


def test_biquad_rejects_nyquist():
    with pytest.raises(ParamRangeError):
        design_biquad(EqBandParams("peak", SAMPLE_RATE / 2, 3.0, 1.0), SAMPLE_RATE)


# ---------------------------------------------------------------- eq


def test_flat_eq_is_near_identity():
    rng = np.random.default_rng(1)
    buf = AudioBuffer(rng.standard_normal(5000) * 0.4)
    out = apply_eq(buf, flat_eq())
    assert np.max(np.abs(out.samples - buf.samples)) <= 1e-9


def test_peak_boost_measured_on_sine():
    bands = (
        EqBandParams("low_shelf", 100.0, 0.0),
        EqBandParams("peak", 1000.0, 12.0, 2.0),
        EqBandParams("peak", 3000.0, 0.0, 1.0),
        EqBandParams("high_shelf", 8000.0, 0.0),
    )
    buf = AudioBuffer(sine(1000.0, 1.0, amp=0.25))
    out = apply_eq(buf, bands)
    tail = slice(SAMPLE_RATE // 2, None)
    ratio = np.sqrt(np.mean(out.samples[0][tail] ** 2) / np.mean(buf.samples[0][tail] ** 2))
    assert ratio == pytest.approx(10 ** (12 / 20), rel=0.02)


def test_eq_deterministic():
    rng = np.random.default_rng(2)
    buf = AudioBuffer(rng.standard_normal(4000) * 0.3)
    bands = (
        EqBandParams("low_shelf", 80.0, -4.0),
        EqBandParams("peak", 700.0, 5.0, 0.8),
        EqBandParams("peak", 2500.0, -6.0, 3.0),
        EqBandParams("high_shelf", 9000.0, 2.0),
    )
    np.testing.assert_array_equal(apply_eq(buf, bands).samples, apply_eq(buf, bands).samples)


def test_eq_applies_same_filter_per_channel():
    mono = sine(500, 0.1, 0.4)
    stereo = AudioBuffer(np.stack([mono, mono]))
    bands = flat_eq()[:1] + (
        EqBandParams("peak", 500.0, 6.0, 1.0),
        EqBandParams("peak", 3000.0, 0.0, 1.0),
        EqBandParams("high_shelf", 8000.0, 0.0),
    )
    out = apply_eq(stereo, bands)
    np.testing.assert_array_equal(out.samples[0], out.samples[1])


# ---------------------------------------------------------------- compressor


def test_compressor_unity_ratio_is_identity():
    rng = np.random.default_rng(3)
    buf = AudioBuffer(rng.standard_normal(4000) * 0.5)
    out = apply_compressor(buf, unity_comp(ratio=1.0, threshold_db=-30.0))
    assert np.max(np.abs(out.samples - buf.samples)) <= 1e-6


def test_compressor_below_threshold_is_identity():
    buf = AudioBuffer(sine(200, 0.1, amp=0.1))  # peaks at -20 dB
    out = apply_compressor(buf, unity_comp(ratio=8.0, threshold_db=0.0))
    assert np.max(np.abs(out.samples - buf.samples)) <= 1e-6


def test_compressor_steady_state_matches_static_curve():
    # slow release keeps the envelope pinned near the sine's amplitude
    p = unity_comp(ratio=4.0, threshold_db=-26.0, attack_ms=1.0, release_ms=1000.0)
    amp = 0.5
    buf = AudioBuffer(sine(50.0, 3.0, amp=amp))
    out = apply_compressor(buf, p)
    tail = slice(2 * SAMPLE_RATE, None)
    measured_db = 20 * np.log10(
        np.sqrt(np.mean(out.samples[0][tail] ** 2) / np.mean(buf.samples[0][tail] ** 2))
    )
    level_db = 20 * np.log10(amp)
    expected_db = compressor_static_gain_db(level_db, p.threshold_db, p.ratio, p.knee_db)
    assert expected_db == pytest.approx((1 / 4 - 1) * (level_db - p.threshold_db), abs=1e-9)
    assert measured_db == pytest.approx(expected_db, abs=0.5)


def test_compressor_soft_knee_matches_static_curve():
    p = unity_comp(ratio=6.0, threshold_db=-20.0, knee_db=12.0, attack_ms=1.0, release_ms=1000.0)
    amp = 10 ** (-18 / 20)  # level inside the knee region
    buf = AudioBuffer(sine(50.0, 3.0, amp=amp))
    out = apply_compressor(buf, p)
    tail = slice(2 * SAMPLE_RATE, None)
    measured_db = 20 * np.log10(
        np.sqrt(np.mean(out.samples[0][tail] ** 2) / np.mean(buf.samples[0][tail] ** 2))
    )
    expected_db = compressor_static_gain_db(-18.0, p.threshold_db, p.ratio, p.knee_db)
    assert measured_db == pytest.approx(expected_db, abs=0.5)


def test_compressor_monotone_in_ratio():
    levels = []
    for ratio in (1.0, 2.0, 4.0, 8.0, 20.0):
        p = unity_comp(ratio=ratio, threshold_db=-26.0, attack_ms=1.0, release_ms=1000.0)
        out = apply_compressor(AudioBuffer(sine(50.0, 2.0, amp=0.5)), p)
        tail = slice(SAMPLE_RATE, None)
        levels.append(float(np.sqrt(np.mean(out.samples[0][tail] ** 2))))
    assert all(a >= b - 1e-12 for a, b in zip(levels, levels[1:]))


def test_compressor_makeup_gain():
    buf = AudioBuffer(sine(200, 0.1, amp=0.1))
    out = apply_compressor(buf, unity_comp(makeup_db=6.0))
    np.testing.assert_allclose(out.samples, buf.samples * 10 ** (6 / 20), rtol=1e-12)


def test_compressor_stereo_link():
    loud = sine(200, 0.5, amp=0.8)
    quiet = sine(310, 0.5, amp=0.05)
    buf = AudioBuffer(np.stack([loud, quiet]))
    p = unity_comp(ratio=8.0, threshold_db=-20.0)
    out = apply_compressor(buf, p)
    # the same linked gain series drives both channels
    mask = (np.abs(buf.samples[0]) > 1e-3) & (np.abs(buf.samples[1]) > 1e-3)
    gain_l = out.samples[0][mask] / buf.samples[0][mask]
    gain_r = out.samples[1][mask] / buf.samples[1][mask]
    np.testing.assert_allclose(gain_l, gain_r, rtol=1e-9)
    assert gain_l.min() < 1.0 - 1e-3  # it did compress
    # the quiet channel alone would not have been compressed like this
    out_solo = apply_compressor(AudioBuffer(quiet), p)
    assert not np.allclose(out_solo.samples[0], out.samples[1])


# ---------------------------------------------------------------- pan


def test_pan_center():
    buf = AudioBuffer(sine(440, 0.02))
    out = apply_pan(buf, 0.5)
    np.testing.assert_allclose(out.samples[0], CENTER_GAIN * buf.samples[0], rtol=1e-12)
    np.testing.assert_allclose(out.samples[1], CENTER_GAIN * buf.samples[0], rtol=1e-12)


def test_pan_hard_left_and_right():
    buf = AudioBuffer(sine(440, 0.02))
    left = apply_pan(buf, 0.0)
    np.testing.assert_array_equal(left.samples[0], buf.samples[0])
    np.testing.assert_allclose(left.samples[1], 0.0, atol=1e-15)
    right = apply_pan(buf, 1.0)
    np.testing.assert_allclose(right.samples[0], 0.0, atol=1e-15)
    np.testing.assert_allclose(right.samples[1], buf.samples[0], rtol=1e-12)


def test_pan_constant_power_1000_positions():
    pans = np.linspace(0.0, 1.0, 1000)
    for pan in pans:
        angle = pan * np.pi / 2
        assert abs(np.cos(angle) ** 2 + np.sin(angle) ** 2 - 1.0) <= 1e-12


def test_pan_rejects_stereo_and_bad_range():
    stereo = AudioBuffer(np.zeros((2, 16)))
    with pytest.raises(UnsupportedAudioError):
        apply_pan(stereo, 0.5)
    with pytest.raises(ParamRangeError):
        apply_pan(AudioBuffer(np.zeros(16)), 1.5)


# ---------------------------------------------------------------- strip & mix


def test_identity_strip_is_center_pan_only():
    params = identity_params(1).strips[0]
    buf = AudioBuffer(sine(330, 0.1, 0.4))
    out = process_channel_strip(buf, params)
    np.testing.assert_allclose(out.samples[0], CENTER_GAIN * buf.samples[0], atol=1e-9)
    np.testing.assert_allclose(out.samples[1], CENTER_GAIN * buf.samples[0], atol=1e-9)


def test_strip_gain_then_identity():
    params = identity_params(1).strips[0]
    params = type(params)(gain_db=-24.0, eq=params.eq, comp=params.comp, pan=params.pan)
    buf = AudioBuffer(sine(330, 0.1, 0.4))
    out = process_channel_strip(buf, params)
    np.testing.assert_allclose(
        out.samples[0], CENTER_GAIN * 10 ** (-1.2) * buf.samples[0], atol=1e-9
    )


def test_strip_deterministic():
    params = sample_random_params(1, seed=42).strips[0]
    buf = AudioBuffer(sine(330, 0.1, 0.4))
    np.testing.assert_array_equal(
        process_channel_strip(buf, params).samples,
        process_channel_strip(buf, params).samples,
    )


def test_mix_single_identity_track():
    tracks = MultitrackSet([AudioBuffer(sine(100, 0.1, 0.2))])
    out = mix(tracks, identity_params(1))
    np.testing.assert_allclose(out.samples[0], CENTER_GAIN * tracks.tracks[0].samples[0], atol=1e-9)
    np.testing.assert_allclose(out.samples[1], CENTER_GAIN * tracks.tracks[0].samples[0], atol=1e-9)


def test_mix_sums_two_identical_tracks():
    track = AudioBuffer(sine(100, 0.1, 0.2))
    tracks = MultitrackSet([track, AudioBuffer(track.samples[0].copy())])
    out = mix(tracks, identity_params(2))
    np.testing.assert_allclose(
        out.samples[0], 2 * CENTER_GAIN * track.samples[0], atol=1e-9
    )


def test_mix_of_silence_is_silent():
    tracks = MultitrackSet([AudioBuffer(np.zeros(4000)) for _ in range(3)])
    out = mix(tracks, identity_params(3))
    np.testing.assert_array_equal(out.samples, np.zeros((2, 4000)))


def test_mix_count_mismatch():
    tracks = MultitrackSet([AudioBuffer(np.zeros(64))])
    with pytest.raises(ParamRangeError):
        mix(tracks, identity_params(2))


def test_unity_console_invariant():
    tracks = synth_tracks(0.25, n_tracks=3, seed=9)
    out = mix(tracks, identity_params(3))
    expected = CENTER_GAIN * np.sum([t.samples[0] for t in tracks.tracks], axis=0)
    assert np.max(np.abs(out.samples[0] - expected)) <= 1e-6
    assert np.max(np.abs(out.samples[1] - expected)) <= 1e-6


def test_mix_invariant_under_paired_permutation():
    tracks = synth_tracks(0.2, n_tracks=4, seed=10)
    params = sample_random_params(4, seed=10)
    out = mix(tracks, params)
    order = [2, 0, 3, 1]
    shuffled_tracks = MultitrackSet(
        [tracks.tracks[i] for i in order], [tracks.names[i] for i in order]
    )
    shuffled_params = type(params)(
        tuple(params.strips[i] for i in order), params.master
    )
    out2 = mix(shuffled_tracks, shuffled_params)
    assert np.max(np.abs(out.samples - out2.samples)) <= 1e-9
