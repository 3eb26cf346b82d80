"""Evaluation metrics for distribution targets and label sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MetricReport", "mse", "js_divergence", "micro_macro_f1"]


@dataclass
class MetricReport:
    """Container for whichever metrics a given evaluation produced."""

    n_examples: int
    mse: float | None = None
    js_divergence: float | None = None
    micro_f1: float | None = None
    macro_f1: float | None = None


def _check_pair(q, p):
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if q.ndim != 1 or q.shape != p.shape:
        raise ValueError("distributions must be one-dimensional with equal length")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise ValueError("distributions must contain only finite values")
    if np.any(q < 0.0) or np.any(p < 0.0):
        raise ValueError("distributions must be nonnegative")
    return q, p


def mse(q, p) -> float:
    """Squared Euclidean distance ||q - p||^2 for one example."""
    q, p = _check_pair(q, p)
    d = q - p
    return float(d @ d)


def _kl(a: np.ndarray, m: np.ndarray) -> float:
    pos = a > 0.0
    return float(np.sum(a[pos] * np.log(a[pos] / m[pos])))


def js_divergence(q, p) -> float:
    """Jensen-Shannon divergence in nats, with the 0 log 0 = 0 convention.

    Symmetric and bounded by log 2, and finite even when the supports of q
    and p are disjoint, because both are compared against their mixture.
    """
    q, p = _check_pair(q, p)
    m = 0.5 * (q + p)
    return 0.5 * _kl(q, m) + 0.5 * _kl(p, m)


def micro_macro_f1(predicted, gold, n_labels: int) -> tuple[float, float]:
    """Micro and macro F1 between two aligned sequences of label sets.

    Micro pools true/false positives and false negatives over all labels;
    macro averages per-label F1 with equal weight.  Any zero denominator
    (a label never predicted and never present, or nothing predicted and
    nothing gold at all) contributes F1 = 0.  Empty predicted sets are
    legitimate and simply produce false negatives.
    """
    predicted = list(predicted)
    gold = list(gold)
    if len(predicted) != len(gold):
        raise ValueError("predicted and gold sequences must have equal length")
    tp = np.zeros(n_labels)
    fp = np.zeros(n_labels)
    fn = np.zeros(n_labels)
    for pred, actual in zip(predicted, gold):
        for k in pred | actual:
            if not 0 <= k < n_labels:
                raise ValueError(f"label {k} out of range for {n_labels} labels")
        for k in pred:
            if k in actual:
                tp[k] += 1
            else:
                fp[k] += 1
        for k in actual - pred:
            fn[k] += 1
    micro_denom = 2 * tp.sum() + fp.sum() + fn.sum()
    micro = float(2 * tp.sum() / micro_denom) if micro_denom > 0 else 0.0
    denom = 2 * tp + fp + fn
    per_label = np.where(denom > 0, 2 * tp / np.where(denom > 0, denom, 1.0), 0.0)
    return micro, float(per_label.mean())
