"""Shared numerical oracles for the test suite.

Kept deliberately independent of the package internals: finite differences
and plain dense algebra only, so they can serve as cross-checks.
"""

import numpy as np


def fd_gradient(fn, z, step=1e-5):
    """Central-difference gradient of a scalar function of a vector."""
    z = np.asarray(z, dtype=np.float64)
    grad = np.zeros_like(z)
    for i in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[i] += step
        zm[i] -= step
        grad[i] = (fn(zp) - fn(zm)) / (2.0 * step)
    return grad


def fd_jacobian(fn, z, step=1e-5):
    """Central-difference Jacobian of a vector function of a vector."""
    z = np.asarray(z, dtype=np.float64)
    cols = []
    for i in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[i] += step
        zm[i] -= step
        cols.append((fn(zp) - fn(zm)) / (2.0 * step))
    return np.stack(cols, axis=1)


def support_margin(z, support):
    """Smallest distance from any coordinate of z to the threshold.

    Used to reject sample points too close to a support boundary, where
    sparsemax is not differentiable and finite differences are meaningless.
    """
    z = np.asarray(z, dtype=np.float64)
    on = np.zeros(z.size, dtype=bool)
    on[support.indices] = True
    margins = [np.min(z[on] - support.tau)]
    if np.any(~on):
        margins.append(np.min(support.tau - z[~on]))
    return min(margins)


def random_simplex_point(rng, dim):
    return rng.dirichlet(np.ones(dim))
