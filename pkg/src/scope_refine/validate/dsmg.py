"""Validity scoring from dropout sub-model samples (DSMG).

Two ingredients, each normalized to [0, 1]:

  variance_term: mean over classes of the across-sample variance of the
    final class probabilities, divided by the theoretical maximum 0.25.

  distance_term: with y = argmax of the mean final probabilities, the
    depth-weighted mean over samples of (1 - probe probability of y) per
    layer, weights w_l = l / sum(1..L) so deeper layers count more. It
    measures how early and how coherently the layerwise trajectory commits
    to the final prediction.

combined = w_var * (1 - variance_term) + w_dist * (1 - distance_term);
higher means more in-scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ..errors import ShapeMismatchError, TooFewSamplesError
from ..model.surrogate import SubmodelSample, softmax


@dataclass(frozen=True)
class DsmgWeights:
    w_var: float = 0.5
    w_dist: float = 0.5

    def __post_init__(self):
        if abs(self.w_var + self.w_dist - 1.0) > 1e-12:
            raise ValueError("w_var + w_dist must equal 1")
        if self.w_var < 0 or self.w_dist < 0:
            raise ValueError("weights must be non-negative")


@dataclass(frozen=True)
class ValidityScore:
    variance_term: float  # normalized to [0, 1]
    distance_term: float
    combined: float
    w_var: float
    w_dist: float


def depth_weights(num_layers: int) -> np.ndarray:
    """Linear-in-depth layer weights l / sum(1..L)."""
    raw = np.arange(1, num_layers + 1, dtype=np.float64)
    return raw / raw.sum()


def dsmg_score(samples: Sequence[SubmodelSample],
               weights: DsmgWeights = DsmgWeights(),
               layer_weights: Sequence[float] | None = None) -> ValidityScore:
    """Score a sub-model sample set. Permutation-invariant in the samples."""
    if len(samples) < 2:
        raise TooFewSamplesError(f"need at least 2 samples, got {len(samples)}")
    probs = np.stack([s.output.probs for s in samples])  # (K, C)
    probe_logits = np.stack([s.output.probe_logits for s in samples])  # (K, L, C)
    if len({s.output.probe_logits.shape for s in samples}) != 1:
        raise ShapeMismatchError("samples disagree on (L, C)")
    if len({len(s.output.probs) for s in samples}) != 1:
        raise ShapeMismatchError("samples disagree on C")
    if probe_logits.shape[2] != probs.shape[1]:
        raise ShapeMismatchError("probe class count differs from head class count")

    num_layers = probe_logits.shape[1]
    if layer_weights is None:
        lw = depth_weights(num_layers)
    else:
        lw = np.asarray(layer_weights, dtype=np.float64)
        if lw.shape != (num_layers,):
            raise ShapeMismatchError(f"expected {num_layers} layer weights, got {lw.shape}")
        if np.any(lw < 0) or abs(lw.sum() - 1.0) > 1e-9:
            raise ValueError("layer weights must be non-negative and sum to 1")

    variance_term = float(np.clip(probs.var(axis=0, ddof=0).mean() / 0.25, 0.0, 1.0))

    predicted = int(np.argmax(probs.mean(axis=0)))
    probe_probs = softmax(probe_logits, axis=2)[:, :, predicted]  # (K, L)
    distances = (1.0 - probe_probs) @ lw  # (K,)
    distance_term = float(distances.mean())

    combined = weights.w_var * (1.0 - variance_term) + weights.w_dist * (1.0 - distance_term)
    return ValidityScore(variance_term, distance_term, float(combined),
                         weights.w_var, weights.w_dist)


# --- verdicts ---------------------------------------------------------------


class Verdict(str, Enum):
    IN_SCOPE = "InScope"
    OUT_OF_SCOPE = "OutOfScope"


@dataclass(frozen=True)
class ValidationVerdict:
    verdict: Verdict
    score: float
    metric: str


def classify_input(score: float, tau: float, metric: str = "dsmg") -> ValidationVerdict:
    """InScope iff score >= tau (boundary inclusive)."""
    verdict = Verdict.IN_SCOPE if score >= tau else Verdict.OUT_OF_SCOPE
    return ValidationVerdict(verdict, float(score), metric)


@dataclass(frozen=True)
class DsmgValidator:
    """Bundles the sub-model sampling parameters and the decision threshold
    so search and the pipeline score candidates consistently."""

    k: int = 30
    base_seed: int = 0
    weights: DsmgWeights = DsmgWeights()
    layer_weights: tuple[float, ...] | None = None
    tau: float = 0.5

    def score_tokens(self, model, tokens) -> ValidityScore:
        samples = model.submodel_samples(tokens, self.k, self.base_seed)
        return dsmg_score(samples, self.weights, self.layer_weights)

    def score_unit(self, model, unit) -> ValidityScore:
        from ..model.surrogate import tokens_of_source
        from ..minic import print_source

        return self.score_tokens(model, tokens_of_source(print_source(unit)))

    def verdict(self, score: ValidityScore) -> ValidationVerdict:
        return classify_input(score.combined, self.tau)
