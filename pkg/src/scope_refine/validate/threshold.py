"""Decision-threshold calibration.

An input is InScope iff its score >= tau, so a cut at tau flags everything
strictly below it. Candidate cuts are 0.0 plus every distinct calibration
score; that covers every achievable flagging partition for [0, 1]-oriented
scores. Two calibration rules:

  mvr_budget(b): largest candidate tau whose mis-correction validation rate
    (fraction of correct predictions flagged) stays within b.
  youden: candidate tau maximizing CVR - MVR, ties toward smaller tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from ..errors import DegenerateCalibrationSetError, NonpositiveTemperatureError


class CalibrationMode(str, Enum):
    FIXED = "fixed"
    MVR_BUDGET = "mvr_budget"
    YOUDEN = "youden"


@dataclass(frozen=True)
class ThresholdConfig:
    calibration: CalibrationMode = CalibrationMode.MVR_BUDGET
    tau: float = 0.5  # used by FIXED
    budget: float = 0.026  # used by MVR_BUDGET

    def __post_init__(self):
        if not 0.0 <= self.budget <= 1.0:
            raise ValueError("budget must be in [0, 1]")


def _rates(scores, correct, tau: float) -> tuple[float, float]:
    """(cvr, mvr) at a cut: flagged = score < tau."""
    n_wrong = n_right = flagged_wrong = flagged_right = 0
    for s, ok in zip(scores, correct):
        if ok:
            n_right += 1
            flagged_right += s < tau
        else:
            n_wrong += 1
            flagged_wrong += s < tau
    cvr = flagged_wrong / n_wrong if n_wrong else 0.0
    mvr = flagged_right / n_right if n_right else 0.0
    return cvr, mvr


def calibrate_threshold(pairs: Sequence[tuple[float, bool]],
                        cfg: ThresholdConfig = ThresholdConfig()) -> float:
    """Pick tau from (score, was_correct) calibration pairs per the config.

    Degenerate sets: youden needs both classes; mvr_budget with no correct
    examples has an undefined MVR and raises; mvr_budget with no incorrect
    examples returns 0.0 (nothing worth flagging)."""
    if cfg.calibration is CalibrationMode.FIXED:
        return cfg.tau
    if not pairs:
        raise DegenerateCalibrationSetError("empty calibration set")
    scores = [float(s) for s, _ in pairs]
    correct = [bool(c) for _, c in pairs]
    has_right = any(correct)
    has_wrong = not all(correct)
    candidates = [0.0] + sorted(set(scores))

    if cfg.calibration is CalibrationMode.MVR_BUDGET:
        if not has_wrong:
            return 0.0
        if not has_right:
            raise DegenerateCalibrationSetError(
                "mvr_budget needs at least one correct example")
        best = 0.0
        for tau in candidates:
            _, mvr = _rates(scores, correct, tau)
            if mvr <= cfg.budget:
                best = tau
        return best

    # youden
    if not (has_right and has_wrong):
        raise DegenerateCalibrationSetError(
            "youden needs both correct and incorrect examples")
    best_tau, best_j = 0.0, -np.inf
    for tau in candidates:  # ascending: strict improvement keeps the smallest
        cvr, mvr = _rates(scores, correct, tau)
        if cvr - mvr > best_j:
            best_tau, best_j = tau, cvr - mvr
    return best_tau


DEFAULT_TEMPERATURE_GRID = (0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0)


def fit_temperature(logits_list: Sequence[np.ndarray], labels: Sequence[int],
                    grid: Sequence[float] = DEFAULT_TEMPERATURE_GRID) -> float:
    """Grid-search temperature minimizing negative log-likelihood."""
    logits = np.stack([np.asarray(l, dtype=np.float64) for l in logits_list])
    y = np.asarray(labels, dtype=np.int64)
    best_t, best_nll = None, np.inf
    for t in grid:
        if not t > 0:
            raise NonpositiveTemperatureError(f"grid temperature {t} must be > 0")
        scaled = logits / t
        logp = scaled - np.max(scaled, axis=1, keepdims=True)
        logp = logp - np.log(np.sum(np.exp(logp), axis=1, keepdims=True))
        nll = float(-logp[np.arange(len(y)), y].mean())
        if nll < best_nll:
            best_t, best_nll = t, nll
    return float(best_t)
