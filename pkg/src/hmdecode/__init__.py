"""Sub-pixel coordinate decoding for 2D activation heatmaps.

The package covers the full loop around a heatmap-producing model's
post-processing stage: Gaussian encoding of points into heatmaps, four
decoders back to coordinates (argmax, quarter-shift, quadratic log-fit,
and trimmed windowed mean), calibration of the window trim on labeled
data, distance/PCK metrics, and a deterministic synthetic harness with
micro-benchmarks.

Hot kernels run on a compiled backend when available, with a
bit-identical pure-Python fallback (see ``hmdecode.backend_name``).
"""

from ._backend import available_backends, backend_name
from .calibration import (
    CalibrationReport,
    CalibrationSpec,
    Objective,
    calibrate,
    default_candidates,
    smoothing_shift_check,
)
from .decoding import (
    STATUS_EMPTY_REGION,
    STATUS_OK,
    STATUS_ZERO_MASS,
    DecoderConfig,
    DeltaTooLargeError,
    IntegralRegion,
    Method,
    Pattern,
    build_region,
    decode,
    decode_batch,
    decode_daec,
    decode_darklite,
    decode_shifting,
    decode_standard,
    max_delta,
)
from .errors import CalibrationError, ConfigError, FormatError, HmdecodeError
from .harness import (
    BenchResult,
    ExperimentPlan,
    NoiseChain,
    bench,
    generate,
    load_plan,
    plan_from_dict,
    run_experiment,
    sample_centers,
)
from .heatmaps import (
    Coord,
    Heatmap,
    NoiseKind,
    NoiseSpec,
    Space,
    encode,
    gaussian_kernel1d,
    inject_noise,
    mirror_lr,
    smooth,
)
from .hmz import HmzBundle, read_hmz, write_hmz
from .metrics import EvalReport, SyntheticSample, evaluate

__version__ = "0.1.0"

__all__ = [
    "available_backends",
    "backend_name",
    "bench",
    "build_region",
    "calibrate",
    "decode",
    "decode_batch",
    "decode_daec",
    "decode_darklite",
    "decode_shifting",
    "decode_standard",
    "default_candidates",
    "encode",
    "evaluate",
    "gaussian_kernel1d",
    "generate",
    "inject_noise",
    "load_plan",
    "max_delta",
    "mirror_lr",
    "plan_from_dict",
    "read_hmz",
    "run_experiment",
    "sample_centers",
    "smooth",
    "smoothing_shift_check",
    "write_hmz",
    "BenchResult",
    "CalibrationError",
    "CalibrationReport",
    "CalibrationSpec",
    "ConfigError",
    "Coord",
    "DecoderConfig",
    "DeltaTooLargeError",
    "EvalReport",
    "ExperimentPlan",
    "FormatError",
    "Heatmap",
    "HmdecodeError",
    "HmzBundle",
    "IntegralRegion",
    "Method",
    "NoiseChain",
    "NoiseKind",
    "NoiseSpec",
    "Objective",
    "Pattern",
    "Space",
    "SyntheticSample",
    "STATUS_EMPTY_REGION",
    "STATUS_OK",
    "STATUS_ZERO_MASS",
]
