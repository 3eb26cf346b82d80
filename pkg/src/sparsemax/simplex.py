"""Softmax and sparsemax transformations of score vectors.

Both transforms map a real score vector onto the probability simplex.
Softmax is dense: every coordinate stays strictly positive.  Sparsemax is
the Euclidean projection onto the simplex and routinely assigns exact
literal zeros, so downstream support logic can rely on ``p > 0`` with no
epsilon fuzz.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "SupportSet",
    "softmax",
    "sparsemax",
    "threshold_and_support",
    "brute_force_projection",
    "BRUTE_FORCE_MAX_DIM",
]

# Exhaustive support enumeration costs 2^K - 1 candidates per call.
BRUTE_FORCE_MAX_DIM = 20


def _as_scores(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("score vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(z)):
        raise ValueError("score vector must contain only finite values")
    return z


@dataclass(frozen=True)
class SupportSet:
    """Support of a sparsemax output.

    indices : ascending positions of the coordinates with z_i > tau
    tau     : threshold subtracted by sparsemax; sum(z[indices] - tau) == 1
    k       : support size, equal to len(indices)
    """

    indices: np.ndarray
    tau: float
    k: int


def softmax(z) -> np.ndarray:
    """Exponentiate and normalise z.

    The maximum score is subtracted before exponentiation.  That shift is
    a mathematical no-op but keeps exp() from overflowing, so arbitrarily
    large scores are handled without warnings.
    """
    z = _as_scores(z)
    e = np.exp(z - z.max())
    return e / e.sum()


def threshold_and_support(z) -> SupportSet:
    """Threshold tau and support of the simplex projection of z.

    Sorts z in descending order (stable, so exactly tied values keep their
    original relative order), takes the largest k satisfying

        1 + k * z_(k) > z_(1) + ... + z_(k)

    with a strict comparison and no epsilon slack, and sets
    tau = (z_(1) + ... + z_(k) - 1) / k.  The support is the first k sorted
    positions, equivalently every coordinate with z_i > tau; an exact tie
    at the boundary never splits, because tied values are feasibility
    equivalent.
    """
    z = _as_scores(z)
    order = np.argsort(-z, kind="stable")
    z_sorted = z[order]
    cssv = np.cumsum(z_sorted)
    ks = np.arange(1, z.size + 1)
    feasible = np.nonzero(1.0 + ks * z_sorted > cssv)[0]
    k = int(feasible[-1]) + 1
    tau = float((cssv[k - 1] - 1.0) / k)
    indices = np.sort(order[:k])
    return SupportSet(indices=indices, tau=tau, k=k)


def sparsemax(z) -> np.ndarray:
    """Euclidean projection of z onto the probability simplex.

    Returns max(z - tau, 0) on the support from
    :func:`threshold_and_support` and exact 0.0 everywhere else.  The
    scatter is deliberately restricted to the support: when a coordinate
    sits exactly at a splitting point, the rounded threshold can land a
    hair below it, and a blanket max(z - tau, 0) would leak a 1e-17-sized
    weight onto a coordinate the support excludes.
    """
    z = _as_scores(z)
    if z.size == 1:
        return np.ones(1)
    s = threshold_and_support(z)
    out = np.zeros(z.size)
    out[s.indices] = np.maximum(z[s.indices] - s.tau, 0.0)
    return out


@lru_cache(maxsize=8)
def _support_masks(dim: int) -> np.ndarray:
    # Rows enumerate every nonempty subset of {0, ..., dim-1} as 0/1 flags.
    bits = np.arange(1, 2**dim, dtype=np.uint32)
    return ((bits[:, None] >> np.arange(dim)) & 1).astype(np.int8)


def brute_force_projection(z) -> np.ndarray:
    """Simplex projection by exhaustive support enumeration.

    For every nonempty candidate support S the projection restricted to S
    must equal z_i - (sum_S z - 1) / |S|, zero elsewhere.  The candidate
    that is nonnegative on S and satisfies z_i <= threshold off S meets the
    optimality conditions of the projection problem, which identify the
    projection uniquely.  Feasibility uses a hairline tolerance: at an
    exact splitting point the rounded threshold can violate both the
    including and the excluding support by one ulp, which would otherwise
    leave no candidate at all.  Among the near-feasible candidates the one
    closest to z wins.  Cost grows as 2^K; intended as an independent
    cross-check for :func:`sparsemax`, not for production use.
    """
    z = _as_scores(z)
    dim = z.size
    if dim > BRUTE_FORCE_MAX_DIM:
        raise ValueError(
            f"enumeration is limited to K <= {BRUTE_FORCE_MAX_DIM}, got K = {dim}"
        )
    masks = _support_masks(dim).astype(np.float64)
    sizes = masks.sum(axis=1)
    taus = (masks @ z - 1.0) / sizes
    gaps = z[None, :] - taus[:, None]
    candidates = gaps * masks
    slack = 1e-9 * max(1.0, float(np.abs(z).max()))
    ok_on = np.all(candidates >= -slack, axis=1)
    ok_off = np.all(gaps * (1.0 - masks) <= slack, axis=1)
    hits = np.nonzero(ok_on & ok_off)[0]
    if hits.size == 0:
        raise RuntimeError("no support satisfied the optimality conditions")
    # Clipping removes ulp-sized negatives; adding 0.0 turns the negative
    # zeros produced by gap * 0 into plain zeros.
    feasible = np.maximum(candidates[hits], 0.0) + 0.0
    distances = ((feasible - z) ** 2).sum(axis=1)
    return feasible[np.argmin(distances)]
