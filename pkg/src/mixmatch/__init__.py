"""mixmatch: match a multitrack mix to the production style of a reference.

The package renders mixes through a classic console model (per-track gain,
4-band EQ, compressor, and pan, plus a stereo master bus), measures style
with audio-production features and spectral losses, and estimates console
parameters for raw tracks by directly optimizing those losses against a
reference song.
"""

from .audio_io import (
    AudioBuffer,
    LoudnessStats,
    MultitrackSet,
    find_active_segment,
    load_multitrack,
    measure_loudness_dbfs,
    normalize_loudness,
    read_wav,
    write_wav,
)
from .console import (
    apply_compressor,
    apply_eq,
    apply_gain,
    apply_pan,
    design_biquad,
    mix,
    process_channel_strip,
)
from .errors import (
    AudioTooShortError,
    ClippingWarning,
    InvalidConfigError,
    MixmatchError,
    NoActiveSegmentError,
    NoUsableTracksError,
    ParamRangeError,
    SilentAudioError,
    UnsupportedAudioError,
)
from .experiment import (
    EvalReport,
    Method1Example,
    Method1Summary,
    evaluate_mix,
    generate_method1_example,
    run_method1_experiment,
)
from .features import (
    BarkFilterbank,
    Spectrogram,
    bark_spectrum,
    build_bark_filterbank,
    crest_factor,
    rms,
    stereo_imbalance,
    stereo_width,
    stft_magnitude,
)
from .losses import (
    AfLossConfig,
    FeatureDistanceReport,
    MrstftConfig,
    af_loss,
    mrstft_loss,
)
from .optimize import (
    ObjectiveSpec,
    OptimizationReport,
    OptimizerConfig,
    equal_loudness_mix,
    fd_gradient,
    match_style,
    objective_eval,
    spsa_gradient,
)
from .params import (
    ChannelStripParams,
    CompressorParams,
    ConsoleParams,
    EqBandParams,
    MasterBusParams,
    denormalize,
    identity_params,
    load_params,
    normalize,
    param_ranges,
    sample_random_params,
    save_params,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "LoudnessStats",
    "MultitrackSet",
    "find_active_segment",
    "load_multitrack",
    "measure_loudness_dbfs",
    "normalize_loudness",
    "read_wav",
    "write_wav",
    "apply_compressor",
    "apply_eq",
    "apply_gain",
    "apply_pan",
    "design_biquad",
    "mix",
    "process_channel_strip",
    "AudioTooShortError",
    "ClippingWarning",
    "InvalidConfigError",
    "MixmatchError",
    "NoActiveSegmentError",
    "NoUsableTracksError",
    "ParamRangeError",
    "SilentAudioError",
    "UnsupportedAudioError",
    "EvalReport",
    "Method1Example",
    "Method1Summary",
    "evaluate_mix",
    "generate_method1_example",
    "run_method1_experiment",
    "BarkFilterbank",
    "Spectrogram",
    "bark_spectrum",
    "build_bark_filterbank",
    "crest_factor",
    "rms",
    "stereo_imbalance",
    "stereo_width",
    "stft_magnitude",
    "AfLossConfig",
    "FeatureDistanceReport",
    "MrstftConfig",
    "af_loss",
    "mrstft_loss",
    "ObjectiveSpec",
    "OptimizationReport",
    "OptimizerConfig",
    "equal_loudness_mix",
    "fd_gradient",
    "match_style",
    "objective_eval",
    "spsa_gradient",
    "ChannelStripParams",
    "CompressorParams",
    "ConsoleParams",
    "EqBandParams",
    "MasterBusParams",
    "denormalize",
    "identity_params",
    "load_params",
    "normalize",
    "param_ranges",
    "sample_random_params",
    "save_params",
    "__version__",
]
