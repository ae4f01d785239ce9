"""Evaluation metrics: rank-statistic AUC, CVR/MVR, and the classification
quartet (accuracy / precision / recall / F1)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import EmptyDenominatorError, SingleClassError
from ..validate.dsmg import ValidationVerdict, Verdict


def auc(scores: Sequence[float], correct: Sequence[bool]) -> float:
    """Probability that a random (correct, incorrect) pair is ordered with
    the correct one's score higher; ties count 0.5. Computed from the rank
    sum with midranks (equivalent to pairwise counting)."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(correct, dtype=bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and correct must be equal-length 1-d sequences")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs both correct and incorrect examples")

    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s), dtype=np.float64)
    sorted_scores = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = float(ranks[y].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def cvr_mvr(verdicts: Sequence[ValidationVerdict | Verdict],
            correct: Sequence[bool]) -> tuple[float, float]:
    """CVR: fraction of incorrect predictions flagged OutOfScope.
    MVR: fraction of correct predictions flagged OutOfScope."""
    if len(verdicts) != len(correct):
        raise ValueError("verdicts and correct must have equal length")
    flags = [(v.verdict if isinstance(v, ValidationVerdict) else v) is Verdict.OUT_OF_SCOPE
             for v in verdicts]
    n_wrong = sum(1 for ok in correct if not ok)
    n_right = len(correct) - n_wrong
    if n_wrong == 0 or n_right == 0:
        raise EmptyDenominatorError("CVR/MVR need both correct and incorrect examples")
    cvr = sum(1 for f, ok in zip(flags, correct) if f and not ok) / n_wrong
    mvr = sum(1 for f, ok in zip(flags, correct) if f and ok) / n_right
    return cvr, mvr


def confusion_counts(y_true: Sequence[int], y_pred: Sequence[int],
                     positive: int = 1) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for t, p in zip(y_true, y_pred):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        elif t == positive:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def classification_metrics(y_true: Sequence[int], y_pred: Sequence[int],
                           positive: int = 1) -> dict[str, float]:
    """Accuracy plus positive-class precision/recall/F1 (binary framing;
    the synthetic task is two-class)."""
    if len(y_true) != len(y_pred) or not y_true:
        raise ValueError("need equal-length non-empty label sequences")
    tp, fp, fn, tn = confusion_counts(y_true, y_pred, positive)
    accuracy = (tp + tn) / len(y_true)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}
