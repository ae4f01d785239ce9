"""Input validation: validity scoring from dropout sub-models, baseline
uncertainty metrics, threshold calibration and in/out-of-scope verdicts."""

from .dsmg import (
    DsmgValidator,
    DsmgWeights,
    ValidationVerdict,
    ValidityScore,
    Verdict,
    classify_input,
    depth_weights,
    dsmg_score,
)
from .threshold import (
    CalibrationMode,
    DEFAULT_TEMPERATURE_GRID,
    ThresholdConfig,
    calibrate_threshold,
    fit_temperature,
)
from .uncertainty import (
    DEFAULT_ENSEMBLE_SIZE,
    ENSEMBLE_METRICS,
    Metric,
    SAMPLE_METRICS,
    SINGLE_OUTPUT_METRICS,
    entropy,
    raw_value,
    score,
    uncertainty_score,
)

__all__ = [
    "CalibrationMode",
    "DEFAULT_ENSEMBLE_SIZE",
    "DEFAULT_TEMPERATURE_GRID",
    "DsmgValidator",
    "DsmgWeights",
    "ENSEMBLE_METRICS",
    "Metric",
    "SAMPLE_METRICS",
    "SINGLE_OUTPUT_METRICS",
    "ThresholdConfig",
    "ValidationVerdict",
    "ValidityScore",
    "Verdict",
    "calibrate_threshold",
    "classify_input",
    "depth_weights",
    "dsmg_score",
    "entropy",
    "fit_temperature",
    "raw_value",
    "score",
    "uncertainty_score",
]
