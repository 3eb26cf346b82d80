"""Jacobians and Jacobian-vector products of the simplex transforms.

The softmax Jacobian at output p is Diag(p) - p p^T.  The sparsemax
Jacobian depends on z only through the support S: with s the 0/1 indicator
of S it is Diag(s) - s s^T / |S|, i.e. the graph Laplacian of a clique on
S scaled by 1 / |S|.  At support boundaries, where the map is not
differentiable, the convention here is to use the Jacobian of the region
the forward pass actually selected.
"""

from __future__ import annotations

import numpy as np

from .simplex import SupportSet

__all__ = [
    "OpCounter",
    "softmax_jacobian",
    "sparsemax_jacobian",
    "softmax_jvp",
    "sparsemax_jvp",
]


class OpCounter:
    """Running tally of coordinate reads and writes in instrumented kernels."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def add(self, n: int) -> None:
        self.count += int(n)


def _check_prob(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(p)):
        raise ValueError("probability vector must contain only finite values")
    if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probability vector must be nonnegative and sum to 1")
    return p


def _check_support(support: SupportSet, dim: int) -> np.ndarray:
    idx = np.asarray(support.indices)
    if idx.size == 0:
        raise ValueError("support must contain at least one index")
    if idx.min() < 0 or idx.max() >= dim:
        raise ValueError(f"support indices out of range for dimension {dim}")
    return idx


def softmax_jacobian(p) -> np.ndarray:
    """Dense softmax Jacobian Diag(p) - p p^T at output p.

    Symmetric, positive semidefinite, rows summing to zero.
    """
    p = _check_prob(p)
    return np.diag(p) - np.outer(p, p)


def sparsemax_jacobian(support: SupportSet, dim: int) -> np.ndarray:
    """Dense sparsemax Jacobian for the given support, as a dim x dim matrix.

    Equals Diag(s) - s s^T / |S| with s the support indicator; every row
    and column off the support is identically zero.
    """
    idx = _check_support(support, dim)
    jac = np.zeros((dim, dim))
    jac[np.ix_(idx, idx)] = -1.0 / idx.size
    jac[idx, idx] += 1.0
    return jac


def softmax_jvp(p, v) -> np.ndarray:
    """Softmax Jacobian-vector product p * (v - <p, v>) without forming the matrix."""
    p = _check_prob(p)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != p.shape:
        raise ValueError("vector length must match the probability vector")
    return p * (v - p @ v)


def sparsemax_jvp(support: SupportSet, v, counter: OpCounter | None = None) -> np.ndarray:
    """Sparsemax Jacobian-vector product: center v on its support mean.

    On the support the result is v minus the mean of v over the support;
    every other coordinate is zero.  Only the |S| support coordinates are
    read and written, so the work is O(|S|) regardless of the full length
    of v.  Pass an :class:`OpCounter` to tally those coordinate touches and
    verify the sublinear cost.  The returned vector is full length with
    explicit zeros off the support.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("vector must be one-dimensional and non-empty")
    idx = _check_support(support, v.size)
    out = np.zeros(v.size)
    picked = v[idx]
    out[idx] = picked - picked.sum() / idx.size
    if counter is not None:
        # One read per support coordinate, one add into the mean, one write.
        counter.add(3 * idx.size)
    return out
