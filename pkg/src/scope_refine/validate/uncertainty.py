"""Baseline uncertainty metrics.

Every metric has a conventional raw value (`raw_value`) and an oriented
score (`score`) normalized so that HIGHER always means more confident /
more in-scope, letting one threshold and AUC pipeline serve all metrics.
Entropy-family raw values are in nats.

Evidence by metric:
  single ModelOutput ........ vanilla, temperature, entropy, least
                              confidence, ratio confidence, margin confidence
  sub-model sample list ..... predictive entropy, mutual information,
                              MC dropout variance
  ensemble output list ...... deep ensemble (one output per member model)
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np

from ..errors import WrongEvidenceKindError
from ..model.surrogate import ModelOutput, SubmodelSample, softmax_with_temperature


class Metric(str, Enum):
    VANILLA = "vanilla"
    TEMPERATURE_SCALED = "temperature"
    ENTROPY = "entropy"
    PREDICTIVE_ENTROPY = "predictive_entropy"
    MUTUAL_INFORMATION = "mutual_information"
    LEAST_CONFIDENCE = "least_confidence"
    RATIO_CONFIDENCE = "ratio_confidence"
    MARGIN_CONFIDENCE = "margin_confidence"
    MC_DROPOUT_VARIANCE = "mc_dropout"
    DEEP_ENSEMBLE = "deep_ensemble"


SINGLE_OUTPUT_METRICS = frozenset({
    Metric.VANILLA, Metric.TEMPERATURE_SCALED, Metric.ENTROPY,
    Metric.LEAST_CONFIDENCE, Metric.RATIO_CONFIDENCE, Metric.MARGIN_CONFIDENCE,
})
SAMPLE_METRICS = frozenset({
    Metric.PREDICTIVE_ENTROPY, Metric.MUTUAL_INFORMATION, Metric.MC_DROPOUT_VARIANCE,
})
ENSEMBLE_METRICS = frozenset({Metric.DEEP_ENSEMBLE})

DEFAULT_ENSEMBLE_SIZE = 3


def entropy(probs: np.ndarray) -> float:
    """Shannon entropy in nats; 0 log 0 = 0."""
    p = np.asarray(probs, dtype=np.float64)
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def _as_prob_matrix(evidence) -> np.ndarray:
    rows = []
    for item in evidence:
        if isinstance(item, SubmodelSample):
            rows.append(item.output.probs)
        elif isinstance(item, ModelOutput):
            rows.append(item.probs)
        else:
            raise WrongEvidenceKindError(
                f"expected ModelOutput or SubmodelSample items, got {type(item).__name__}")
    if len(rows) < 2:
        raise WrongEvidenceKindError("sample-based metrics need at least 2 items")
    return np.stack(rows)


def _single(evidence) -> ModelOutput:
    if not isinstance(evidence, ModelOutput):
        raise WrongEvidenceKindError(
            f"expected a single ModelOutput, got {type(evidence).__name__}")
    return evidence


def _sorted_desc(probs: np.ndarray) -> np.ndarray:
    return np.sort(np.asarray(probs, dtype=np.float64))[::-1]


def raw_value(metric: Metric, evidence, temperature: float = 1.0) -> float:
    """Conventional value of the metric (entropy in nats, variance, max
    probability, ...), before orientation normalization."""
    metric = Metric(metric)
    if metric in SINGLE_OUTPUT_METRICS:
        out = _single(evidence)
        if metric is Metric.VANILLA:
            return float(np.max(out.probs))
        if metric is Metric.TEMPERATURE_SCALED:
            return float(np.max(softmax_with_temperature(out.logits, temperature)))
        if metric is Metric.ENTROPY:
            return entropy(out.probs)
        if metric is Metric.LEAST_CONFIDENCE:
            # 1 - (1 - max p): the complement of the least-confidence gap
            return float(1.0 - (1.0 - np.max(out.probs)))
        top = _sorted_desc(out.probs)
        if metric is Metric.MARGIN_CONFIDENCE:
            return float(top[0] - top[1])
        # ratio confidence: 1 - p2/p1
        return float(1.0 - top[1] / top[0]) if top[0] > 0 else 0.0

    if metric in SAMPLE_METRICS:
        probs = _as_prob_matrix(evidence)
        mean_probs = probs.mean(axis=0)
        if metric is Metric.PREDICTIVE_ENTROPY:
            return entropy(mean_probs)
        if metric is Metric.MUTUAL_INFORMATION:
            return entropy(mean_probs) - float(np.mean([entropy(p) for p in probs]))
        predicted = int(np.argmax(mean_probs))
        return float(probs[:, predicted].var(ddof=0))

    if metric is Metric.DEEP_ENSEMBLE:
        probs = _as_prob_matrix(evidence)
        return entropy(probs.mean(axis=0))
    raise WrongEvidenceKindError(f"unknown metric {metric!r}")


def score(metric: Metric, evidence, temperature: float = 1.0) -> float:
    """Oriented score: higher = more confident. Entropy-family values flip
    to ln(C) - value; dropout variance flips to 1 - var/0.25; the rest are
    already confidence-oriented."""
    metric = Metric(metric)
    value = raw_value(metric, evidence, temperature)
    if metric in (Metric.ENTROPY, Metric.PREDICTIVE_ENTROPY,
                  Metric.MUTUAL_INFORMATION, Metric.DEEP_ENSEMBLE):
        num_classes = _num_classes(metric, evidence)
        return float(np.log(num_classes) - value)
    if metric is Metric.MC_DROPOUT_VARIANCE:
        return float(1.0 - value / 0.25)
    return value


def _num_classes(metric: Metric, evidence) -> int:
    if metric in SINGLE_OUTPUT_METRICS:
        return len(_single(evidence).probs)
    first = next(iter(evidence))
    return len(first.output.probs if isinstance(first, SubmodelSample) else first.probs)


def uncertainty_score(metric: Metric, evidence, temperature: float = 1.0) -> float:
    """Alias for `score`, the oriented form used by calibration and AUC."""
    return score(metric, evidence, temperature)
