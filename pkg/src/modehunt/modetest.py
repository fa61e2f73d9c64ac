"""Bootstrap significance testing of candidate modes.

A genuine mode sits at a local maximum, where the density Hessian is
negative definite.  For each candidate location (held fixed from the
training fit), the test data are resampled with replacement, the
Hessian of the resampled estimate is evaluated at the location, and
percentile confidence intervals are formed for its eigenvalues with a
Bonferroni split across the d of them.  The mode is significant when
every interval lies entirely below zero.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from . import backend
from .seeding import MODETEST, substream

MIN_REPLICATES = 200


@dataclass(frozen=True)
class ModeRecord:
    """Test outcome for one candidate mode.

    Eigenvalues are in nondecreasing order; intervals are expanded, if
    needed, to cover the full-sample point estimate, so a mode whose
    point-estimate curvature is already nonnegative can never pass.
    """

    location: np.ndarray
    eigenvalues: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    p: float
    significant: bool

    def to_dict(self):
        return {
            "location": self.location.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "ci_lower": self.ci_lower.tolist(),
            "ci_upper": self.ci_upper.tolist(),
            "p": self.p,
            "significant": self.significant,
        }


@dataclass(frozen=True)
class ModeTestResult:
    """Per-mode records plus the test configuration that produced them."""

    modes: tuple
    alpha: float
    n_boot: int
    h: float

    @property
    def n_significant(self):
        return sum(1 for m in self.modes if m.significant)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "bootstrap_replicates": self.n_boot,
            "bandwidth": self.h,
            "modes": [m.to_dict() for m in self.modes],
        }


@dataclass(frozen=True)
class GateSummary:
    """Signal-claim decision: are enough extra modes significant?"""

    signal_claim: bool
    required: int
    n_significant: int
    significant_modes: tuple

    def to_dict(self):
        return {
            "signal_claim": self.signal_claim,
            "required_significant": self.required,
            "n_significant": self.n_significant,
            "significant_modes": list(self.significant_modes),
        }


def test_modes(modes, test_data, h, alpha=0.001, n_boot=1000, seed=0):
    """Bootstrap eigenvalue confidence intervals at fixed mode locations.

    For each of ``n_boot`` resamples of the held-out test data, a
    kernel estimate with bandwidth ``h`` supplies the Hessian at every
    candidate location; per-eigenvalue percentile intervals use the
    Bonferroni-split level alpha/d.  Quantiles are clamped at the
    extreme order statistics, so very small alpha degrades gracefully
    toward the bootstrap min/max rather than failing.  The per-mode p
    is d times the smallest one-sided proportion of resamples with an
    eigenvalue >= 0, clamped to [0, 1]; the verdict itself follows the
    interval rule.
    """
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be a positive real, got {h}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n_boot < MIN_REPLICATES:
        raise ValueError(f"bootstrap needs at least {MIN_REPLICATES} replicates, got {n_boot}")
    values = test_data.values
    n, d = values.shape
    if n < 2:
        raise ValueError("mode testing needs at least 2 test rows")
    if modes.locations.shape[1] != d:
        raise ValueError(f"modes have dimension {modes.locations.shape[1]}, test data {d}")
    locations = np.ascontiguousarray(modes.locations)
    m = len(modes)

    def eigenvalues_at(sample):
        hess = backend.active.hessian(sample, locations, h)
        hess = 0.5 * (hess + hess.transpose(0, 2, 1))
        return np.linalg.eigvalsh(hess)  # ascending per mode

    point = eigenvalues_at(values)
    rng = substream(seed, MODETEST)
    draws = np.empty((n_boot, m, d))
    for b in range(n_boot):
        idx = rng.integers(0, n, size=n)
        draws[b] = eigenvalues_at(np.ascontiguousarray(values[idx]))

    q = alpha / (2.0 * d)
    lower = np.quantile(draws, min(max(q, 0.0), 1.0), axis=0)
    upper = np.quantile(draws, min(max(1.0 - q, 0.0), 1.0), axis=0)
    lower = np.minimum(lower, point)
    upper = np.maximum(upper, point)
    prop_nonneg = (draws >= 0.0).mean(axis=0)

    records = []
    for j in range(m):
        p = float(min(1.0, max(0.0, d * prop_nonneg[j].min())))
        records.append(
            ModeRecord(
                location=locations[j].copy(),
                eigenvalues=point[j],
                ci_lower=lower[j],
                ci_upper=upper[j],
                p=p,
                significant=bool((upper[j] < 0.0).all()),
            )
        )
    return ModeTestResult(tuple(records), float(alpha), int(n_boot), float(h))


def gate(result, background_mode_count):
    """Decide the signal claim from the per-mode verdicts.

    Candidates arrive ranked by descending density, so the M_b
    strongest peaks play the background role and the trailing
    M_bs - M_b are the extra modes a signal would have to explain.
    The claim requires every one of those extra modes to be backed by
    significant curvature; a significant background peak alone can
    never carry the claim.
    """
    m_bs = len(result.modes)
    required = m_bs - int(background_mode_count)
    if required <= 0:
        raise ValueError(
            "gate expects more candidate modes than background modes "
            f"(got {m_bs} candidates vs {background_mode_count} background)"
        )
    passing = tuple(i for i, rec in enumerate(result.modes) if rec.significant)
    extra = result.modes[int(background_mode_count):]
    claim = all(rec.significant for rec in extra)
    return GateSummary(claim, required, len(passing), passing)
