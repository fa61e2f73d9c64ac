"""Mean-shift mode seeking and modal clustering.

Every start point ascends the density surface by the kernel-weighted
mean iteration; endpoints that land together (single linkage, radius
``TOL_MERGE * h``) form one mode.  Any point of the sample space can
then be labeled by ascending it and matching the endpoint to the
nearest mode, so partitions extend beyond the estimation sample.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from . import backend
from .kde import _as_queries

log = logging.getLogger(__name__)

TOL_STEP = 1e-6  # convergence: step length below TOL_STEP * h
MAX_ITER = 10_000  # generous cap; ascent is slow near saddles
TOL_MERGE = 0.1  # endpoints closer than TOL_MERGE * h are one mode

UNASSIGNED = 0  # partition label for unreachable points


class UnreachablePointError(RuntimeError):
    """Raised when every kernel weight underflows at a query point."""


@dataclass(frozen=True)
class ModeSet:
    """Distinct density modes, sorted by descending density.

    locations : (M, d) mode coordinates
    densities : (M,) estimated density at each mode
    """

    locations: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        loc = np.ascontiguousarray(self.locations, dtype=float)
        den = np.ascontiguousarray(self.densities, dtype=float)
        if loc.ndim != 2 or loc.shape[0] < 1:
            raise ValueError("locations must be a non-empty (M, d) matrix")
        if den.shape != (loc.shape[0],):
            raise ValueError("densities must have one entry per location")
        if (np.diff(den) > 0).any():
            raise ValueError("modes must be sorted by descending density")
        loc.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "densities", den)

    def __len__(self):
        return self.locations.shape[0]

    def to_dict(self):
        return {
            "locations": self.locations.tolist(),
            "densities": self.densities.tolist(),
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(np.asarray(payload["locations"]), np.asarray(payload["densities"]))


@dataclass(frozen=True)
class Partition:
    """Per-point cluster labels referring to a ModeSet.

    Labels run 1..M in mode order; 0 marks points whose ascent was
    unreachable (kernel weights underflow everywhere along the way).
    """

    labels: np.ndarray
    modes: ModeSet

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty vector")
        if labels.min() < 0 or labels.max() > len(self.modes):
            raise ValueError("labels must lie in 0..M")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def n_unassigned(self):
        return int((self.labels == UNASSIGNED).sum())


def _ascend_batch(model, starts):
    """Run the backend fixed-point iteration; returns (endpoints, status)."""
    endpoints, n_iter, status = backend.active.mean_shift(
        model.data, starts, model.h, TOL_STEP * model.h, MAX_ITER
    )
    capped = int((status == 1).sum())
    if capped:
        log.info("%d of %d ascents hit the %d-iteration cap", capped, starts.shape[0], MAX_ITER)
    return endpoints, status


def ascend(model, x0):
    """Ascend the density surface from x0; returns the limit point.

    Iterates x <- sum_i w_i X_i / sum_i w_i with Gaussian kernel
    weights w_i until the step length drops below TOL_STEP * h or
    MAX_ITER is reached.  Raises UnreachablePointError when x0 is so
    far from the data that every weight underflows.
    """
    q, single = _as_queries(x0, model.d)
    if not single:
        raise ValueError("ascend takes a single point; use find_modes/assign for batches")
    endpoints, status = _ascend_batch(model, q)
    if status[0] == 2:
        raise UnreachablePointError("unreachable point: all kernel weights underflow")
    return endpoints[0]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _single_linkage_groups(points, radius):
    """Group rows of ``points`` by single linkage at the given radius.

    Endpoints of one converged ascent cloud coincide almost exactly, so
    the rows are first collapsed on a lattice 100x finer than the merge
    radius; exact linkage then runs on the (few) distinct
    representatives.  Returns a group id per input row.
    """
    m = points.shape[0]
    keys = np.round(points / (radius * 1e-2)).astype(np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    reps = np.empty((uniq.shape[0], points.shape[1]))
    reps[inverse[::-1]] = points[::-1]  # first row of each cell wins
    u = uniq.shape[0]
    uf = _UnionFind(u)
    sq = (reps * reps).sum(axis=1)
    r2 = radius * radius
    chunk = max(1, 4_000_000 // max(u, 1))
    for lo in range(0, u, chunk):
        hi = min(u, lo + chunk)
        d2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (reps[lo:hi] @ reps.T)
        for i, j in np.argwhere(d2 < r2):
            uf.union(lo + int(i), int(j))
    roots = np.array([uf.find(i) for i in range(u)])
    _, group = np.unique(roots, return_inverse=True)
    return group[inverse]


def find_modes(model, starts):
    """Ascend from every start and merge the endpoints into a ModeSet.

    Endpoint pairs closer than TOL_MERGE * h merge (single linkage);
    each merged group is represented by its highest-density endpoint.
    Unreachable starts are skipped with a warning; if every start is
    unreachable, that is an error.
    """
    starts = np.asarray(starts, dtype=float)
    if starts.ndim == 1:
        starts = starts[None, :]
    if starts.shape[0] == 0:
        raise ValueError("find_modes needs at least one start")
    endpoints, status = _ascend_batch(model, np.ascontiguousarray(starts))
    ok = status != 2
    if not ok.any():
        raise UnreachablePointError("unreachable point: every start has underflowing weights")
    if not ok.all():
        log.warning("%d of %d starts were unreachable and were skipped",
                    int((~ok).sum()), starts.shape[0])
    endpoints = endpoints[ok]
    group = _single_linkage_groups(endpoints, TOL_MERGE * model.h)
    dens = backend.active.density(model.data, np.ascontiguousarray(endpoints), model.h)
    n_groups = int(group.max()) + 1
    locations = np.empty((n_groups, model.d))
    densities = np.empty(n_groups)
    for g in range(n_groups):
        members = np.flatnonzero(group == g)
        best = members[np.argmax(dens[members])]
        locations[g] = endpoints[best]
        densities[g] = dens[best]
    order = np.argsort(-densities, kind="stable")
    return ModeSet(locations[order], densities[order])


def count_modes(model):
    """Number of modes when every data row is used as a start."""
    return len(find_modes(model, model.data))


def assign(modes, model, points):
    """Partition arbitrary points by the mode their ascent reaches.

    Each point ascends on ``model``; its endpoint is labeled with the
    nearest mode (Euclidean; ties go to the lower index, i.e. higher
    density).  Unreachable points receive the UNASSIGNED label 0.
    """
    pts, _ = _as_queries(points, model.d)
    endpoints, status = _ascend_batch(model, pts)
    labels = np.zeros(pts.shape[0], dtype=np.int64)
    ok = status != 2
    if ok.any():
        e = endpoints[ok]
        d2 = (e * e).sum(axis=1)[:, None] + (modes.locations * modes.locations).sum(axis=1)[None, :]
        d2 -= 2.0 * (e @ modes.locations.T)
        labels[ok] = np.argmin(d2, axis=1) + 1
    if not ok.all():
        log.warning("%d of %d points were unreachable and left unassigned",
                    int((~ok).sum()), pts.shape[0])
    return Partition(labels, modes)


def write_partition_csv(partition, path):
    """Write labels as CSV rows (row, label, mode); mode is -1 when unassigned."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "label", "mode"])
        for i, lab in enumerate(partition.labels):
            writer.writerow([i, int(lab), int(lab) - 1])
