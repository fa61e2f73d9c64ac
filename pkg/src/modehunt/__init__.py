"""Semisupervised detection of collective signals as density modes.

A labeled background sample pins down what "no signal" looks like; the
experimental sample is then examined for an extra density mode that the
background cannot explain.  The toolkit covers kernel density
estimation with exact derivatives, mean-shift modal clustering,
agreement-driven bandwidth selection, permutation-based variable
screening, and bootstrap mode-significance testing, plus a CLI that
chains them into a reporting pipeline.
"""

from . import backend
from .agreement import (
    ContingencyTable,
    adjusted_rand,
    contingency,
    fowlkes_mallows,
    jaccard,
    true_positive_rate,
)
from .bwselect import (
    BandwidthGrid,
    BandwidthSearchResult,
    GridRecord,
    background_reference,
    default_grid,
    final_partition,
    plateau_length,
    sweep,
)
from .dataset import (
    BACKGROUND,
    SIGNAL,
    Dataset,
    MixtureSpec,
    Standardizer,
    apply_standardizer,
    fit_standardizer,
    invert_standardizer,
    load_csv,
    project,
    sample_mixture,
    split,
    write_csv,
)
from .kde import DensityModel, Kernel, normal_scale_bandwidth, plugin_bandwidth
from .modal import (
    ModeSet,
    Partition,
    UnreachablePointError,
    ascend,
    assign,
    count_modes,
    find_modes,
)
from .modetest import GateSummary, ModeTestResult, gate, test_modes
from .varselect import (
    IseTestOutcome,
    RelevanceCounter,
    ise_statistic,
    ise_test,
    select_variables,
)

__version__ = "0.1.0"

__all__ = [
    "BACKGROUND",
    "SIGNAL",
    "BandwidthGrid",
    "BandwidthSearchResult",
    "ContingencyTable",
    "Dataset",
    "DensityModel",
    "GateSummary",
    "GridRecord",
    "IseTestOutcome",
    "Kernel",
    "MixtureSpec",
    "ModeSet",
    "ModeTestResult",
    "Partition",
    "RelevanceCounter",
    "Standardizer",
    "UnreachablePointError",
    "adjusted_rand",
    "apply_standardizer",
    "ascend",
    "assign",
    "backend",
    "background_reference",
    "contingency",
    "count_modes",
    "default_grid",
    "final_partition",
    "find_modes",
    "fit_standardizer",
    "fowlkes_mallows",
    "gate",
    "invert_standardizer",
    "ise_statistic",
    "ise_test",
    "jaccard",
    "load_csv",
    "normal_scale_bandwidth",
    "plateau_length",
    "plugin_bandwidth",
    "project",
    "sample_mixture",
    "select_variables",
    "split",
    "sweep",
    "test_modes",
    "true_positive_rate",
    "write_csv",
]
