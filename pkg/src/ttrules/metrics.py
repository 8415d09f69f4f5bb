"""Evaluation metrics: ROC-AUC, macro one-vs-rest AUC, and R squared."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import UndefinedMetricError


@dataclass
class EvalResult:
    name: str
    value: float
    n_samples: int
    per_class: dict = field(default_factory=dict)


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve via the rank-sum statistic.

    Ties get midranks, so the result equals P(score_pos > score_neg) plus
    half the tie probability.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise UndefinedMetricError("scores and labels must have the same length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("roc_auc needs both classes present")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def macro_ovr_auc(probs, labels, average: str = "macro") -> float:
    """Mean of one-vs-rest AUCs over the classes present.

    probs has one column per class; a class absent from labels is skipped
    with a warning so small validation splits stay usable. The default is an
    unweighted (macro) mean, which penalizes rare-class failure; pass
    average="weighted" for a support-weighted mean.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
        raise UndefinedMetricError("probs must be (rows, classes) aligned with labels")
    if average not in ("macro", "weighted"):
        raise UndefinedMetricError(f"unknown average '{average}'")
    present = np.unique(labels)
    if len(present) < 2:
        raise UndefinedMetricError("macro OvR AUC needs at least 2 classes present")
    aucs, weights = [], []
    for cls in range(probs.shape[1]):
        if cls not in present:
            warnings.warn(f"class {cls} absent from labels; skipped in macro AUC")
            continue
        aucs.append(roc_auc(probs[:, cls], (labels == cls).astype(np.int64)))
        weights.append(float((labels == cls).sum()))
    if average == "weighted":
        return float(np.average(aucs, weights=weights))
    return float(np.mean(aucs))


def r2(predictions, targets) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise UndefinedMetricError("predictions and targets must have the same length")
    if len(targets) < 2:
        raise UndefinedMetricError("r2 needs at least 2 samples")
    ss_tot = float(((targets - targets.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise UndefinedMetricError("r2 is undefined for zero-variance targets")
    ss_res = float(((targets - predictions) ** 2).sum())
    return 1.0 - ss_res / ss_tot
