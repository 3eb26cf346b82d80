"""Loss functions whose gradients move probability mass toward a target.

Each loss returns its value together with the exact gradient in a single
call, so one threshold computation is shared between the two.  Labels are
0-based.  The ``_multi`` variants accept an arbitrary target distribution
q on the simplex and reduce exactly to the single-label forms when q is a
one-hot vector.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .simplex import _as_scores, softmax, threshold_and_support

__all__ = [
    "LossValue",
    "delta_distribution",
    "logistic_loss",
    "sparsemax_loss",
    "logistic_loss_multi",
    "sparsemax_loss_multi",
    "huber_binary_reference",
]


class LossValue(NamedTuple):
    value: float
    gradient: np.ndarray


def delta_distribution(k: int, dim: int) -> np.ndarray:
    """One-hot target distribution for the single label k."""
    if not 0 <= k < dim:
        raise ValueError(f"label {k} out of range for {dim} classes")
    q = np.zeros(dim)
    q[k] = 1.0
    return q


def _check_label(k: int, dim: int) -> int:
    k = int(k)
    if not 0 <= k < dim:
        raise ValueError(f"label {k} out of range for {dim} classes")
    return k


def _check_target(q, dim: int) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (dim,):
        raise ValueError("target distribution length must match the scores")
    if not np.all(np.isfinite(q)):
        raise ValueError("target distribution must contain only finite values")
    if np.any(q < 0.0) or abs(q.sum() - 1.0) > 1e-9:
        raise ValueError("target distribution must be nonnegative and sum to 1")
    return q


def _log_sum_exp(z: np.ndarray) -> float:
    m = z.max()
    return float(m + np.log(np.exp(z - m).sum()))


def logistic_loss(z, k: int) -> LossValue:
    """Negative log-likelihood of label k under softmax scores."""
    z = _as_scores(z)
    k = _check_label(k, z.size)
    value = -z[k] + _log_sum_exp(z)
    grad = softmax(z)
    grad[k] -= 1.0
    return LossValue(float(value), grad)


def sparsemax_loss(z, k: int) -> LossValue:
    """Sparse analogue of the logistic loss for a single label k.

    Value is -z_k + (sum over the support of z_j^2 - tau^2) / 2 + 1/2 and
    the gradient is sparsemax(z) minus the one-hot target.  The value hits
    exactly zero once z_k beats every other score by a margin of 1.
    """
    z = _as_scores(z)
    k = _check_label(k, z.size)
    s = threshold_and_support(z)
    zs = z[s.indices]
    value = -z[k] + 0.5 * np.sum(zs * zs - s.tau * s.tau) + 0.5
    grad = np.maximum(z - s.tau, 0.0)
    grad[k] -= 1.0
    return LossValue(float(value), grad)


def logistic_loss_multi(z, q) -> LossValue:
    """KL divergence from softmax(z) to the target q, with 0 log 0 = 0."""
    z = _as_scores(z)
    q = _check_target(q, z.size)
    pos = q > 0.0
    entropy = -np.sum(q[pos] * np.log(q[pos]))
    value = -entropy - q @ z + _log_sum_exp(z)
    return LossValue(float(value), softmax(z) - q)


def sparsemax_loss_multi(z, q) -> LossValue:
    """Sparse loss against a full target distribution q.

    Equals (||q - z||^2 - ||sparsemax(z) - z||^2) / 2, so it is nonnegative
    and vanishes exactly when sparsemax(z) == q.
    """
    z = _as_scores(z)
    q = _check_target(q, z.size)
    s = threshold_and_support(z)
    zs = z[s.indices]
    value = -(q @ z) + 0.5 * np.sum(zs * zs - s.tau * s.tau) + 0.5 * (q @ q)
    grad = np.maximum(z - s.tau, 0.0) - q
    return LossValue(float(value), grad)


def huber_binary_reference(t: float) -> float:
    """Modified Huber margin loss of a two-class score difference t.

    Zero past a unit margin, linear for t <= -1, quadratic in between.
    The two-class sparsemax loss with the first label correct equals this
    function of t = z_1 - z_2.
    """
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("margin must be finite")
    if t >= 1.0:
        return 0.0
    if t <= -1.0:
        return -t
    return (t - 1.0) * (t - 1.0) / 4.0
