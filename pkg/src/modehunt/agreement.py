"""Agreement between two labelings of the same rows.

All indices are computed from the contingency table, treating both
labelings as flat partitions: label values carry no meaning beyond
identity, so every index is invariant under relabeling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two label vectors.

    counts[i, j] is the number of rows with first label row_labels[i]
    and second label col_labels[j]; label values are sorted.
    """

    counts: np.ndarray
    row_labels: np.ndarray
    col_labels: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or (counts < 0).any():
            raise ValueError("counts must be a matrix of nonnegative integers")
        if counts.sum() < 2:
            raise ValueError("agreement needs at least 2 rows")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self):
        return int(self.counts.sum())


def contingency(a, b):
    """ContingencyTable of two equally long label vectors."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("agreement needs at least 2 rows")
    row_labels, ai = np.unique(a, return_inverse=True)
    col_labels, bi = np.unique(b, return_inverse=True)
    counts = np.zeros((row_labels.size, col_labels.size), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts, row_labels, col_labels)


def _pair_counts(table):
    """Unordered same-label row-pair counts (both, first, second, total)."""
    counts = table.counts

    def choose2(x):
        return int((x * (x - 1) // 2).sum())

    tt = choose2(counts)
    ta = choose2(counts.sum(axis=1))
    tb = choose2(counts.sum(axis=0))
    n = table.n
    return tt, ta, tb, n * (n - 1) // 2


def fowlkes_mallows(table):
    """Geometric mean of pair precision and pair recall, in [0, 1].

    FM = T / sqrt(P * Q) with T the pairs co-clustered in both
    labelings and P, Q the pairs co-clustered in each.  Remains
    informative when one side is a single class, which is why the
    pipeline uses it as the default agreement index.
    """
    tt, ta, tb, _ = _pair_counts(table)
    if ta == 0 or tb == 0:
        raise ValueError("degenerate partition: a labeling with all-singleton classes")
    return tt / np.sqrt(ta) / np.sqrt(tb)


def adjusted_rand(table):
    """Rand index corrected for chance; 1 means identical partitions."""
    tt, ta, tb, pairs = _pair_counts(table)
    expected = ta * tb / pairs
    maximum = (ta + tb) / 2.0
    if maximum == expected:
        log.warning("adjusted Rand denominator is zero; returning 1 by convention")
        return 1.0
    return (tt - expected) / (maximum - expected)


def jaccard(table):
    """Pairs co-clustered in both labelings / pairs co-clustered in either."""
    tt, ta, tb, _ = _pair_counts(table)
    union = ta + tb - tt
    if union == 0:
        log.warning("no co-clustered pairs in either labeling; Jaccard is 1 by convention")
        return 1.0
    return tt / union


def true_positive_rate(table, positive_row, positive_col):
    """Fraction of the positive row class assigned to the positive column class."""
    counts = table.counts
    margin = int(counts[positive_row].sum())
    if margin == 0:
        raise ValueError(f"row {positive_row} of the contingency table is empty")
    return counts[positive_row, positive_col] / margin
