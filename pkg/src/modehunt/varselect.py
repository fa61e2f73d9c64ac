"""Variable selection by repeated two-sample density-difference tests.

Each iteration projects both samples onto a random subset of k
variables and asks whether the two kernel density estimates differ,
using the integrated squared difference of the estimates as the test
statistic with a permutation null.  Variables that keep landing in
rejecting subsets accumulate relevance counts; a largest-gap read of
the final counts yields the selected set.  The counter is a heuristic
screening device, not a calibrated multiple-testing procedure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .kde import normal_scale_bandwidth
from .seeding import VARSELECT, substream

# materialize the pooled kernel matrix only below this pooled size;
# above it, permutation statistics stream over row blocks instead
_DENSE_LIMIT = 5000


@dataclass(frozen=True)
class IseTestOutcome:
    """Result of one two-sample integrated-squared-difference test."""

    statistic: float
    p_value: float
    n_perm: int

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")
        if self.statistic < 0:
            raise ValueError("statistic must be nonnegative")


@dataclass(frozen=True)
class RelevanceCounter:
    """Per-variable tally of membership in rejecting subsets."""

    counts: np.ndarray
    iterations: int
    subset_size: int
    threshold: float

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or (counts < 0).any() or (counts > self.iterations).any():
            raise ValueError("counts must be nonnegative integers bounded by the iteration count")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)


def _values(x):
    """Accept a Dataset or a bare (n, k) array; return the array."""
    v = x.values if hasattr(x, "values") else np.ascontiguousarray(np.asarray(x, dtype=float))
    if v.ndim != 2 or v.shape[0] < 1:
        raise ValueError(f"expected an (n, k) sample matrix, got shape {v.shape}")
    return v


def ise_statistic(xb, xbs, h):
    """Integrated squared difference of the two kernel estimates.

    The integral has a closed form because the convolution of two
    Gaussians of scale h is the Gaussian of scale h*sqrt(2):

        T = (1/n_b^2)  sum_ij phi(x_i - x_j)
          - (2/(n_b n_bs)) sum_ij phi(x_i - y_j)
          + (1/n_bs^2) sum_ij phi(y_i - y_j)

    with phi the k-variate product Gaussian of scale h*sqrt(2).  The
    value is the exact integral, nonnegative, and zero only when the
    two estimates coincide.
    """
    a = _values(xb)
    b = _values(xbs)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be a positive real, got {h}")
    s = h * math.sqrt(2.0)
    na, nb = a.shape[0], b.shape[0]
    cross = backend.active.gaussian_cross_sum
    t = cross(a, a, s) / na**2 - 2.0 * cross(a, b, s) / (na * nb) + cross(b, b, s) / nb**2
    return max(t, 0.0)


def _quadratic_forms(z, v_matrix, scale):
    """T(v) = v' W v for each row v, with W the pooled kernel matrix.

    W_ij = phi_scale(z_i - z_j).  Small pools materialize W once; large
    pools stream over row blocks so memory stays bounded.
    """
    n = z.shape[0]
    if n <= _DENSE_LIMIT:
        w = backend.active.gaussian_cross_matrix(z, z, scale)
        return np.einsum("pn,pn->p", v_matrix @ w, v_matrix)
    out = np.zeros(v_matrix.shape[0])
    block = max(1, _DENSE_LIMIT**2 // n)
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        w_rows = backend.active.gaussian_cross_matrix(z[lo:hi], z, scale)
        out += np.einsum("pc,pc->p", v_matrix[:, lo:hi], v_matrix @ w_rows.T)
    return out


def ise_test(xb, xbs, h, n_perm=199, seed=0):
    """Permutation test of equality of the two smoothed distributions.

    The observed statistic is compared with its distribution under
    random reassignment of the pooled rows to the two groups;
    p = (1 + #{permuted T >= observed T}) / (n_perm + 1).
    """
    a = _values(xb)
    b = _values(xbs)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be a positive real, got {h}")
    if n_perm < 99:
        raise ValueError("n_perm must be at least 99 for a usable p-value resolution")
    na, nb = a.shape[0], b.shape[0]
    z = np.ascontiguousarray(np.vstack([a, b]))
    v0 = np.concatenate([np.full(na, 1.0 / na), np.full(nb, -1.0 / nb)])
    scale = h * math.sqrt(2.0)

    rng = substream(seed)
    v_perm = rng.permuted(np.tile(v0, (n_perm, 1)), axis=1)
    t_all = _quadratic_forms(z, np.vstack([v0[None, :], v_perm]), scale)
    t_obs, t_perm = t_all[0], t_all[1:]
    p = (1.0 + int((t_perm >= t_obs).sum())) / (n_perm + 1.0)
    return IseTestOutcome(max(float(t_obs), 0.0), p, n_perm)


def _largest_gap_prefix(counts):
    """Indices before the largest drop in the descending count profile.

    Returns (order, split) where order sorts counts descending (ties by
    variable index) and split is the prefix length ending at the
    largest consecutive gap (earliest such gap on ties).
    """
    order = np.argsort(-counts, kind="stable")
    sorted_counts = counts[order]
    gaps = sorted_counts[:-1] - sorted_counts[1:]
    split = int(np.argmax(gaps)) + 1
    return order, split, int(gaps.max(initial=0))


def select_variables(xb, xbs, m_iter=1000, k=3, seed=0, threshold=0.01, n_perm=199):
    """Screen variables by random-subset two-sample tests.

    For each of ``m_iter`` iterations, draw k distinct variables, test
    the projected samples (bandwidth: normal-scale for the projected
    background), and on p < threshold increment the count of each drawn
    variable.  Selection reads the counter by the largest-gap rule; the
    prefix must dominate clearly (mean more than twice the rest, and
    above a small-count noise floor), otherwise the selection is empty.

    Returns (RelevanceCounter, selected) with selected a sorted list of
    0-based variable indices (empty = no relevance signal).
    """
    a = _values(xb)
    b = _values(xbs)
    d = a.shape[1]
    if b.shape[1] != d:
        raise ValueError(f"dimension mismatch: {d} vs {b.shape[1]}")
    if not 1 <= k < d:
        raise ValueError(f"subset size k={k} must satisfy 1 <= k < d={d}")
    if m_iter < 1:
        raise ValueError("iteration count must be positive")
    counts = np.zeros(d, dtype=np.int64)
    h = normal_scale_bandwidth(a.shape[0], k)
    for i in range(m_iter):
        it_rng = substream(seed, VARSELECT, i)
        subset = np.sort(it_rng.choice(d, size=k, replace=False))
        outcome = ise_test(
            a[:, subset], b[:, subset], h, n_perm=n_perm,
            seed=int(it_rng.integers(2**63)),
        )
        if outcome.p_value < threshold:
            counts[subset] += 1

    counter = RelevanceCounter(counts, m_iter, k, threshold)
    order, split, gap = _largest_gap_prefix(counts)
    prefix = counts[order[:split]]
    suffix = counts[order[split:]]
    # noise floor: several times the expected per-variable false-increment
    # count under a uniform null (each iteration touches k of d variables)
    floor = 5.0 * max(1.0, m_iter * (k / d) * threshold)
    selected = []
    if gap > 0 and suffix.size > 0 and prefix.mean() > 2.0 * suffix.mean() and prefix.mean() >= floor:
        selected = sorted(int(v) for v in order[:split])
    return counter, selected


def write_counter_csv(counter, names, path):
    """Write the relevance counter as CSV rows (variable, count)."""
    if len(names) != counter.counts.size:
        raise ValueError("one name per counted variable is required")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable", "count"])
        for name, count in zip(names, counter.counts):
            writer.writerow([name, int(count)])
