"""NumPy implementations of the pairwise Gaussian kernels.

This is the fallback backend; ``_core.pyx`` provides the compiled
counterpart with the same call contract.  All functions expect
C-contiguous float64 arrays shaped (n, d); validation is done by the
callers in :mod:`modehunt.kde` and friends.

Query/data blocks are processed in chunks so the intermediate (m, n)
arrays stay within a fixed memory budget.
"""

import numpy as np

BACKEND_NAME = "numpy"

# pairwise block budget: number of (query, datum) cells held at once
_CHUNK_CELLS = 4_000_000

# 0.5 * smin beyond this value means every kernel weight underflows a double
_UNDERFLOW_HALF_EXP = 745.0


def _chunk(m, n):
    rows = max(1, _CHUNK_CELLS // max(n, 1))
    for lo in range(0, m, rows):
        yield lo, min(lo + rows, m)


def density(data, queries, h):
    """Product-Gaussian KDE values at each query point."""
    n, d = data.shape
    m = queries.shape[0]
    out = np.empty(m)
    for lo, hi in _chunk(m, n):
        diff = (queries[lo:hi, None, :] - data[None, :, :]) / h
        s = np.einsum("mnd,mnd->mn", diff, diff)
        out[lo:hi] = np.exp(-0.5 * s).sum(axis=1)
    return out * ((2.0 * np.pi) ** (-0.5 * d) / (n * h**d))


def gradient(data, queries, h):
    """Exact gradient of the KDE at each query point, shape (m, d)."""
    n, d = data.shape
    m = queries.shape[0]
    out = np.empty((m, d))
    for lo, hi in _chunk(m, n):
        u = (queries[lo:hi, None, :] - data[None, :, :]) / h
        e = np.exp(-0.5 * np.einsum("mnd,mnd->mn", u, u))
        out[lo:hi] = np.einsum("mn,mnd->md", e, u)
    return out * (-((2.0 * np.pi) ** (-0.5 * d)) / (n * h ** (d + 1)))


def hessian(data, queries, h):
    """Exact Hessian of the KDE at each query point, shape (m, d, d)."""
    n, d = data.shape
    m = queries.shape[0]
    out = np.empty((m, d, d))
    eye = np.eye(d)
    for lo, hi in _chunk(m, n):
        u = (queries[lo:hi, None, :] - data[None, :, :]) / h
        e = np.exp(-0.5 * np.einsum("mnd,mnd->mn", u, u))
        outer = np.einsum("mn,mnj,mnk->mjk", e, u, u)
        out[lo:hi] = outer - e.sum(axis=1)[:, None, None] * eye
    return out * ((2.0 * np.pi) ** (-0.5 * d) / (n * h ** (d + 2)))


def mean_shift(data, starts, h, step_tol, max_iter):
    """Fixed-point kernel-weighted mean iteration from each start.

    Returns (endpoints, n_iter, status) where status holds per point:
    0 = step dropped below ``step_tol``, 1 = iteration cap reached,
    2 = unreachable (every kernel weight underflows at the current point).
    Weights are computed relative to the nearest datum, so the update is
    stable far into the tails; unreachability uses the shared underflow
    rule so both backends agree.
    """
    m = starts.shape[0]
    x = np.array(starts, dtype=float, copy=True)
    n_iter = np.zeros(m, dtype=np.int64)
    status = np.ones(m, dtype=np.int8)  # default: cap reached
    active = np.arange(m)
    for _ in range(max_iter):
        if active.size == 0:
            break
        diff = (x[active, None, :] - data[None, :, :]) / h
        s = np.einsum("mnd,mnd->mn", diff, diff)
        smin = s.min(axis=1)
        dead = 0.5 * smin > _UNDERFLOW_HALF_EXP
        if dead.any():
            status[active[dead]] = 2
            keep = ~dead
            active = active[keep]
            if active.size == 0:
                break
            s = s[keep]
            smin = smin[keep]
        e = np.exp(-0.5 * (s - smin[:, None]))
        new_x = (e @ data) / e.sum(axis=1)[:, None]
        step = np.linalg.norm(new_x - x[active], axis=1)
        x[active] = new_x
        n_iter[active] += 1
        done = step < step_tol
        if done.any():
            status[active[done]] = 0
            active = active[~done]
    return x, n_iter, status


def gaussian_cross_sum(a, b, scale):
    """Sum over all pairs of the product-Gaussian density at a_i - b_j."""
    return float(gaussian_cross_matrix(a, b, scale).sum())


def gaussian_cross_matrix(a, b, scale):
    """(na, nb) matrix of product-Gaussian densities of ``scale`` at a_i - b_j."""
    na, k = a.shape
    nb = b.shape[0]
    out = np.empty((na, nb))
    for lo, hi in _chunk(na, nb):
        diff = (a[lo:hi, None, :] - b[None, :, :]) / scale
        s = np.einsum("mnd,mnd->mn", diff, diff)
        out[lo:hi] = np.exp(-0.5 * s)
    out *= (2.0 * np.pi) ** (-0.5 * k) * scale ** (-k)
    return out
