"""Probabilistic WiFi fingerprint localization with short-term-memory priors.

Memoryless Bayes estimation over a fingerprint radio map (several RSSI and
CSI likelihood families), the semi-sequential (SSP) variant that windows the
prior around the previous position estimate, a synthetic-site simulator and
an experiment harness.
"""

from .backend import active_backend
from .engine import (
    EmptyPriorSupportError,
    StepEstimate,
    TrackConfig,
    TrackState,
    estimate_location,
    log_likelihood_over_map,
    posterior,
    prior_over_map,
    step,
    track,
    uniform_prior,
)
from .fingerprints import (
    SENTINEL_RSSI,
    CsiMatrix,
    FeatureVector,
    Location,
    RadioMap,
    RadioPoint,
    ScanSet,
    csi_effective_power,
    csi_to_scanset,
    euclidean_distance,
)
from .likelihood import (
    EPS_FLOOR,
    SIGMA_FLOOR,
    build_radio_map,
    evaluate,
    fit_double_gaussian,
    fit_histogram,
    fit_kernel,
    fit_lognormal,
    fit_single_gaussian,
    radio_map_from_csi,
)
from .metrics import ErrorReport, improvement_ratio, localization_errors, sigma_sweep, summarize
from .simulator import (
    EnvironmentSpec,
    PathLossParams,
    TrajectorySpec,
    build_training_set,
    generate_trajectory,
    inject_history_error,
    sample_scan,
    synth_radio_truth,
)
from .windows import PriorWindow, window_prob

__version__ = "0.1.0"

__all__ = [
    "CsiMatrix",
    "EmptyPriorSupportError",
    "EnvironmentSpec",
    "ErrorReport",
    "EPS_FLOOR",
    "FeatureVector",
    "Location",
    "PathLossParams",
    "PriorWindow",
    "RadioMap",
    "RadioPoint",
    "ScanSet",
    "SENTINEL_RSSI",
    "SIGMA_FLOOR",
    "StepEstimate",
    "TrackConfig",
    "TrackState",
    "TrajectorySpec",
    "active_backend",
    "build_radio_map",
    "build_training_set",
    "csi_effective_power",
    "csi_to_scanset",
    "estimate_location",
    "euclidean_distance",
    "evaluate",
    "fit_double_gaussian",
    "fit_histogram",
    "fit_kernel",
    "fit_lognormal",
    "fit_single_gaussian",
    "generate_trajectory",
    "improvement_ratio",
    "inject_history_error",
    "localization_errors",
    "log_likelihood_over_map",
    "posterior",
    "prior_over_map",
    "radio_map_from_csi",
    "sample_scan",
    "sigma_sweep",
    "step",
    "summarize",
    "synth_radio_truth",
    "track",
    "uniform_prior",
    "window_prob",
]
