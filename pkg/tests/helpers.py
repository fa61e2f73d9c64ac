"""Independent oracles used to verify the library's fast paths.

Everything here is deliberately written the slow, obvious way — scalar
loops, dense grids, brute-force pair scans — so a disagreement with the
library points at the library.
"""

import math

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)


def direct_density(data, x, h):
    """Plain double-loop product-kernel density at one point."""
    n, d = data.shape
    total = 0.0
    for i in range(n):
        prod = 1.0
        for j in range(d):
            u = (x[j] - data[i, j]) / h
            prod *= math.exp(-0.5 * u * u) / SQRT_2PI
        total += prod
    return total / (n * h**d)


def direct_gradient(data, x, h):
    """Coordinate-wise differentiation of each kernel product, summed."""
    n, d = data.shape
    out = np.zeros(d)
    for i in range(n):
        prod = 1.0
        u = np.empty(d)
        for j in range(d):
            u[j] = (x[j] - data[i, j]) / h
            prod *= math.exp(-0.5 * u[j] * u[j]) / SQRT_2PI
        for j in range(d):
            out[j] += prod * (-u[j] / h)
    return out / (n * h**d)


def direct_hessian(data, x, h):
    """Second derivatives of each kernel product, summed term by term."""
    n, d = data.shape
    out = np.zeros((d, d))
    for i in range(n):
        prod = 1.0
        u = np.empty(d)
        for j in range(d):
            u[j] = (x[j] - data[i, j]) / h
            prod *= math.exp(-0.5 * u[j] * u[j]) / SQRT_2PI
        for j in range(d):
            for k in range(d):
                if j == k:
                    out[j, k] += prod * (u[j] * u[j] - 1.0) / (h * h)
                else:
                    out[j, k] += prod * (u[j] * u[k]) / (h * h)
    return out / (n * h**d)


def fd_gradient(f, x, eps=1e-5):
    """Central finite differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for j in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[j] += eps
        lo[j] -= eps
        out[j] = (f(hi) - f(lo)) / (2.0 * eps)
    return out


def fd_jacobian(g, x, eps=1e-5):
    """Central finite differences of a vector function (rows = outputs)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[j] += eps
        lo[j] -= eps
        cols.append((np.asarray(g(hi)) - np.asarray(g(lo))) / (2.0 * eps))
    return np.column_stack(cols)


def grid_local_maxima_1d(density_at, lo, hi, n_grid=20001):
    """Locations of strict local maxima of a 1-d function on a dense grid."""
    grid = np.linspace(lo, hi, n_grid)
    vals = np.asarray(density_at(grid[:, None]))
    inner = (vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:])
    return grid[1:-1][inner]


def pair_counts(a, b):
    """Brute-force O(n^2) co-clustering pair counts.

    Returns (both, in_a, in_b, total): unordered pairs sharing a label
    in both labelings, in the first, in the second, and overall.
    """
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    n = a.size
    both = in_a = in_b = total = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa = a[i] == a[j]
            sb = b[i] == b[j]
            both += sa and sb
            in_a += sa
            in_b += sb
            total += 1
    return both, in_a, in_b, total


def trapezoid_ise_1d(a, b, h, span=10.0, n_nodes=100_001):
    """Quadrature of the squared difference of two 1-d kernel estimates."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    lo = min(a.min(), b.min()) - span
    hi = max(a.max(), b.max()) + span
    grid = np.linspace(lo, hi, n_nodes)

    def kde(sample):
        u = (grid[:, None] - sample[None, :]) / h
        return np.exp(-0.5 * u * u).sum(axis=1) / (sample.size * h * SQRT_2PI)

    diff = kde(a) - kde(b)
    return np.trapezoid(diff * diff, grid)


def tensor_ise_2d(a, b, h, span=8.0, n_nodes=801):
    """Tensor-grid quadrature of the squared difference in 2-d."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.minimum(a.min(axis=0), b.min(axis=0)) - span
    hi = np.maximum(a.max(axis=0), b.max(axis=0)) + span
    gx = np.linspace(lo[0], hi[0], n_nodes)
    gy = np.linspace(lo[1], hi[1], n_nodes)

    def kde(sample):
        ux = (gx[:, None] - sample[None, :, 0]) / h
        uy = (gy[:, None] - sample[None, :, 1]) / h
        kx = np.exp(-0.5 * ux * ux)  # (nx, n)
        ky = np.exp(-0.5 * uy * uy)  # (ny, n)
        return (kx @ ky.T) / (sample.shape[0] * (h * SQRT_2PI) ** 2)

    diff = kde(a) - kde(b)
    inner = np.trapezoid(diff * diff, gy, axis=1)
    return np.trapezoid(inner, gx)


def bayes_labels(x, weights, means, covs):
    """Most probable component of each row under a known Gaussian mixture."""
    x = np.asarray(x, dtype=float)
    scores = []
    for w, mean, cov in zip(weights, means, covs):
        cov = np.asarray(cov, dtype=float)
        diff = x - np.asarray(mean)[None, :]
        solve = np.linalg.solve(cov, diff.T).T
        quad = (diff * solve).sum(axis=1)
        logdet = np.linalg.slogdet(cov)[1]
        scores.append(math.log(w) - 0.5 * (quad + logdet))
    return np.argmax(np.column_stack(scores), axis=1)
