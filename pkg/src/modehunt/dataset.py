"""Sample containers: loading, standardization, projection, splitting,
and synthetic mixture generation.

A :class:`Dataset` is an immutable (n, d) matrix of finite reals with
column names and, optionally, per-row truth tags.  Truth tags exist for
evaluation only; no estimation routine reads them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .seeding import substream

BACKGROUND = 0
SIGNAL = 1


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric sample with named columns.

    values : (n, d) float64, all entries finite
    columns : d column names
    truth : optional (n,) int8 of 0 (background) / 1 (signal) tags
    """

    values: np.ndarray
    columns: tuple[str, ...]
    truth: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"values must be a non-empty 2-d matrix, got shape {values.shape}")
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite entry at row {i + 1}, column {self.columns[j]!r}")
        if len(self.columns) != values.shape[1]:
            raise ValueError(f"{len(self.columns)} column names for {values.shape[1]} columns")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "columns", tuple(str(c) for c in self.columns))
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=np.int8)
            if truth.shape != (values.shape[0],):
                raise ValueError("truth length must match the number of rows")
            object.__setattr__(self, "truth", _frozen(truth))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def take_rows(self, index):
        """Dataset restricted to the given row indices (truth carried along)."""
        index = np.asarray(index, dtype=int)
        truth = None if self.truth is None else self.truth[index]
        return Dataset(self.values[index], self.columns, truth)


@dataclass(frozen=True)
class Standardizer:
    """Per-column affine map x -> (x - center) / scale."""

    center: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).ravel()
        scale = np.asarray(self.scale, dtype=float).ravel()
        if center.shape != scale.shape:
            raise ValueError("center and scale must have equal length")
        if not (scale > 0).all():
            raise ValueError("scale entries must be strictly positive")
        object.__setattr__(self, "center", _frozen(center))
        object.__setattr__(self, "scale", _frozen(scale))


@dataclass(frozen=True)
class MixtureSpec:
    """Gaussian mixture used by the synthetic generators.

    ``components`` is a list of (weight, mean, covariance) triples;
    weights are positive and sum to 1.  ``signal_indices`` marks which
    components count as signal.  A row is drawn from the signal group
    with probability ``signal_fraction`` and from the background group
    otherwise; within each group, components are picked proportionally
    to their weights.
    """

    components: tuple
    signal_fraction: float = 0.0
    signal_indices: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        comps = []
        for weight, mean, cov in self.components:
            mean = np.asarray(mean, dtype=float).ravel()
            cov = np.asarray(cov, dtype=float)
            if cov.shape != (mean.size, mean.size):
                raise ValueError("covariance shape must match the mean dimension")
            if not np.allclose(cov, cov.T):
                raise ValueError("covariance must be symmetric")
            try:
                np.linalg.cholesky(cov)
            except np.linalg.LinAlgError:
                raise ValueError("covariance must be positive definite") from None
            if weight <= 0:
                raise ValueError("component weights must be positive")
            comps.append((float(weight), _frozen(mean), _frozen(cov)))
        if not comps:
            raise ValueError("mixture needs at least one component")
        dims = {c[1].size for c in comps}
        if len(dims) != 1:
            raise ValueError("all components must share one dimension")
        if abs(sum(c[0] for c in comps) - 1.0) > 1e-9:
            raise ValueError("component weights must sum to 1")
        if not 0.0 <= self.signal_fraction < 1.0:
            raise ValueError("signal_fraction must lie in [0, 1)")
        signal = frozenset(int(i) for i in self.signal_indices)
        if any(i < 0 or i >= len(comps) for i in signal):
            raise ValueError("signal component index out of range")
        if self.signal_fraction > 0 and not signal:
            raise ValueError("signal_fraction > 0 requires signal components")
        if len(signal) == len(comps):
            raise ValueError("at least one component must be background")
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "signal_indices", signal)

    @property
    def dimension(self):
        return self.components[0][1].size


def load_csv(path, label_column=None, background_label="background", signal_label="signal"):
    """Read a headered numeric CSV into a Dataset.

    When ``label_column`` names a column, its cells become the truth
    tags (values must equal ``background_label`` or ``signal_label``)
    and the column is excluded from the numeric matrix.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
    columns = [c for i, c in enumerate(header) if i != label_idx]
    values = np.empty((len(rows), len(columns)))
    truth = np.empty(len(rows), dtype=np.int8) if label_idx is not None else None
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"{path}: row {r + 1} has {len(row)} cells, expected {len(header)}")
        c_out = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                if cell == background_label:
                    truth[r] = BACKGROUND
                elif cell == signal_label:
                    truth[r] = SIGNAL
                else:
                    raise ValueError(
                        f"{path}: row {r + 1}, column {header[c]!r}: unknown label {cell!r}"
                    )
                continue
            try:
                x = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: row {r + 1}, column {header[c]!r}: non-numeric cell {cell!r}"
                ) from None
            if not np.isfinite(x):
                raise ValueError(f"{path}: row {r + 1}, column {header[c]!r}: non-finite cell {cell!r}")
            values[r, c_out] = x
            c_out += 1
    return Dataset(values, tuple(columns), truth)


def write_csv(data, path, label_column=None, background_label="background", signal_label="signal"):
    """Write a Dataset as CSV; floats use shortest round-trip formatting.

    Truth tags are emitted as a trailing label column when
    ``label_column`` is given and the dataset carries them.
    """
    with_truth = label_column is not None and data.truth is not None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(data.columns) + ([label_column] if with_truth else [])
        writer.writerow(header)
        for r in range(data.n):
            row = [repr(float(v)) for v in data.values[r]]
            if with_truth:
                row.append(signal_label if data.truth[r] == SIGNAL else background_label)
            writer.writerow(row)


def fit_standardizer(data):
    """Column means and sample standard deviations (denominator n - 1)."""
    if data.n < 2:
        raise ValueError("standardizer needs at least 2 rows")
    center = data.values.mean(axis=0)
    scale = data.values.std(axis=0, ddof=1)
    flat = np.flatnonzero(scale <= 0)
    if flat.size:
        raise ValueError(f"column {data.columns[flat[0]]!r} is constant; cannot standardize")
    return Standardizer(center, scale)


def apply_standardizer(s, data):
    if s.center.size != data.d:
        raise ValueError(f"standardizer has {s.center.size} columns, data has {data.d}")
    return Dataset((data.values - s.center) / s.scale, data.columns, data.truth)


def invert_standardizer(s, data):
    """Inverse of :func:`apply_standardizer`."""
    if s.center.size != data.d:
        raise ValueError(f"standardizer has {s.center.size} columns, data has {data.d}")
    return Dataset(data.values * s.scale + s.center, data.columns, data.truth)


def project(data, columns):
    """Dataset restricted to the given 0-based column indices, in the given order."""
    idx = [int(c) for c in columns]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate column index in {idx}")
    for c in idx:
        if not 0 <= c < data.d:
            raise ValueError(f"column index {c} out of range for d={data.d}")
    return Dataset(data.values[:, idx], tuple(data.columns[c] for c in idx), data.truth)


def split(data, fraction, seed):
    """Disjoint row split; the first part gets round(fraction * n) rows.

    Row order within each part follows the input.  Deterministic in the
    seed (split substream of the seeding scheme).
    """
    if data.n < 2:
        raise ValueError("cannot split fewer than 2 rows")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    k = int(np.floor(fraction * data.n + 0.5))
    if k == 0 or k == data.n:
        raise ValueError(f"fraction {fraction} leaves an empty part for n={data.n}")
    perm = substream(seed, 1).permutation(data.n)
    first = np.sort(perm[:k])
    second = np.sort(perm[k:])
    return data.take_rows(first), data.take_rows(second)


def sample_mixture(spec, n, seed):
    """Draw n i.i.d. rows from a MixtureSpec; truth marks signal rows."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = substream(seed, 0)
    d = spec.dimension
    weights = np.array([c[0] for c in spec.components])
    sig = np.array(sorted(spec.signal_indices), dtype=int)
    bkg = np.array([i for i in range(len(spec.components)) if i not in spec.signal_indices], dtype=int)

    is_signal = rng.random(n) < spec.signal_fraction
    comp = np.empty(n, dtype=int)
    for group, mask in ((sig, is_signal), (bkg, ~is_signal)):
        count = int(mask.sum())
        if count == 0:
            continue
        p = weights[group] / weights[group].sum()
        comp[mask] = rng.choice(group, size=count, p=p)

    values = np.empty((n, d))
    for i, (_, mean, cov) in enumerate(spec.components):
        rows = np.flatnonzero(comp == i)
        if rows.size == 0:
            continue
        chol = np.linalg.cholesky(cov)
        values[rows] = rng.standard_normal((rows.size, d)) @ chol.T + mean
    truth = np.where(is_signal, SIGNAL, BACKGROUND).astype(np.int8)
    columns = tuple(f"v{j + 1}" for j in range(d))
    return Dataset(values, columns, truth)
