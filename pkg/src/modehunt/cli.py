"""Command-line pipeline: variable selection, bandwidth sweep, mode testing.

Subcommands
-----------
select-vars : run the relevance screening and emit counter + selection
detect      : full detection pipeline, ending in a machine-readable report
synth       : generate synthetic background/experimental CSVs from config

Exit codes partition all outcomes: 0 signal claim / selection found,
2 configuration error, 3 input-output error, 4 no relevance signal,
5 no candidate signal bandwidth, 6 no signal evidence.  Codes 4-6 are
analysis outcomes, not failures; their reports are still written.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys

import numpy as np
import scipy

from . import __version__, agreement, backend, bwselect, dataset, modal, modetest, varselect
from .config import ConfigError, load_config
from .kde import plugin_bandwidth
from .seeding import SYNTH, substream

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NO_SELECTION = 4
EXIT_NO_CANDIDATE = 5
EXIT_NO_EVIDENCE = 6

_STATUS_CODES = {
    "signal-claim": EXIT_OK,
    "selection-found": EXIT_OK,
    "synthesized": EXIT_OK,
    "no-relevance-signal": EXIT_NO_SELECTION,
    "no-candidate-bandwidth": EXIT_NO_CANDIDATE,
    "no-signal-evidence": EXIT_NO_EVIDENCE,
}


class DataError(Exception):
    """Unreadable or malformed input data."""


def _csv_label_column(path, wanted):
    """The configured label column if the file actually has it, else None."""
    if wanted is None:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if wanted in header:
        return wanted
    log.warning("%s: configured label column %r absent; loading without truth", path, wanted)
    return None


def _load(path, label_column):
    try:
        return dataset.load_csv(path, label_column=_csv_label_column(path, label_column))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _require(cfg, attr, section_key):
    value = getattr(cfg, attr)
    if value is None:
        raise ConfigError(f"missing required config key {section_key}")
    return value


def _write_json(payload, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2))
        fh.write("\n")


def _finish_report(report, out_dir, status, canonical):
    report["status"] = status
    report["exit_code"] = _STATUS_CODES[status]
    if not canonical:
        report["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _write_json(report, os.path.join(out_dir, "report.json"))
    log.info("report written: %s (%s)", os.path.join(out_dir, "report.json"), status)
    return report["exit_code"]


def _base_report(cfg, seed):
    return {
        "seed": seed,
        "config": cfg.to_dict(),
        "versions": {
            "modehunt": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "backend": backend.active.BACKEND_NAME,
        },
    }


def cmd_synth(cfg, out_dir, seed, canonical):
    """Write synthetic background and experimental samples to CSV."""
    d = cfg.dimension
    background_only = dataset.MixtureSpec(
        ((1.0, np.zeros(d), np.eye(d)),), 0.0, frozenset()
    )
    if cfg.signal_fraction > 0:
        signal_cov = cfg.signal_sd**2 * np.eye(d)
        experimental_spec = dataset.MixtureSpec(
            ((0.5, np.zeros(d), np.eye(d)), (0.5, np.asarray(cfg.signal_mean), signal_cov)),
            cfg.signal_fraction,
            frozenset({1}),
        )
    else:
        experimental_spec = background_only
    stream = substream(seed, SYNTH)
    label = cfg.label_column or "label"
    for name, spec, n in (
        ("background.csv", background_only, cfg.n_background),
        ("experimental.csv", experimental_spec, cfg.n_experimental),
    ):
        sample = dataset.sample_mixture(spec, n, int(stream.integers(2**63)))
        dataset.write_csv(sample, os.path.join(out_dir, name), label_column=label)
        log.info("wrote %s (%d rows)", os.path.join(out_dir, name), n)
    return EXIT_OK


def _run_selection(cfg, bg, ex, seed, out_dir):
    """Standardize on the background and run the relevance screening."""
    std = dataset.fit_standardizer(bg)
    counter, selected = varselect.select_variables(
        dataset.apply_standardizer(std, bg),
        dataset.apply_standardizer(std, ex),
        m_iter=cfg.iterations,
        k=cfg.subset_size,
        seed=seed,
        threshold=cfg.threshold,
        n_perm=cfg.permutations,
    )
    counter_path = os.path.join(out_dir, "counter.csv")
    varselect.write_counter_csv(counter, bg.columns, counter_path)
    return counter, selected, "counter.csv"


def cmd_select_vars(cfg, out_dir, seed, canonical):
    """Relevance screening only: counter CSV + selected-variables JSON."""
    bg = _load(_require(cfg, "background", "[data] background"), cfg.label_column)
    ex = _load(_require(cfg, "experimental", "[data] experimental"), cfg.label_column)
    if ex.d != bg.d:
        raise DataError(f"dimension mismatch: background d={bg.d}, experimental d={ex.d}")
    if cfg.subset_size >= bg.d:
        raise ConfigError(
            f"[varselect] subset_size {cfg.subset_size} must be below the dimension {bg.d}"
        )
    _, selected, counter_name = _run_selection(cfg, bg, ex, seed, out_dir)
    status = "selection-found" if selected else "no-relevance-signal"
    payload = {
        "status": status,
        "selected_indices": selected,
        "selected_names": [bg.columns[i] for i in selected],
        "counter_csv": counter_name,
        "seed": seed,
        "note": "relevance counts are a heuristic screen, not a calibrated test",
    }
    _write_json(payload, os.path.join(out_dir, "selected_variables.json"))
    return _STATUS_CODES[status]


def _choose_variables(cfg, bg, ex_fit, seed, out_dir, report):
    """Fixed list, screening, or all variables; returns indices or None on no-selection."""
    if cfg.variables is not None:
        for v in cfg.variables:
            if v >= bg.d:
                raise ConfigError(f"[varselect] variables: index {v} out of range for d={bg.d}")
        report["variables"] = {"mode": "fixed", "indices": list(cfg.variables)}
        return list(cfg.variables)
    if cfg.subset_size >= bg.d:
        log.warning("subset_size %d >= dimension %d; screening skipped, using all variables",
                    cfg.subset_size, bg.d)
        report["variables"] = {"mode": "all", "indices": list(range(bg.d))}
        return list(range(bg.d))
    _, selected, counter_name = _run_selection(cfg, bg, ex_fit, seed, out_dir)
    report["variables"] = {
        "mode": "selected",
        "indices": list(selected),
        "counter_csv": counter_name,
    }
    return list(selected) if selected else None


def cmd_detect(cfg, out_dir, seed, canonical):
    """Full pipeline: screening, bandwidth sweep, mode test, report."""
    bg = _load(_require(cfg, "background", "[data] background"), cfg.label_column)
    ex = _load(_require(cfg, "experimental", "[data] experimental"), cfg.label_column)
    if ex.d != bg.d:
        raise DataError(f"dimension mismatch: background d={bg.d}, experimental d={ex.d}")
    if cfg.test is not None:
        ex_fit = ex
        test = _load(cfg.test, cfg.label_column)
        if test.d != bg.d:
            raise DataError(f"dimension mismatch: test d={test.d}, expected {bg.d}")
    else:
        ex_fit, test = dataset.split(ex, 1.0 - cfg.test_fraction, seed)
    report = _base_report(cfg, seed)

    indices = _choose_variables(cfg, bg, ex_fit, seed, out_dir, report)
    if indices is None:
        return _finish_report(report, out_dir, "no-relevance-signal", canonical)
    names = [bg.columns[i] for i in indices]
    report["variables"]["names"] = names

    std = dataset.fit_standardizer(dataset.project(bg, indices))
    xb = dataset.apply_standardizer(std, dataset.project(bg, indices))
    xbs = dataset.apply_standardizer(std, dataset.project(ex_fit, indices))
    xtest = dataset.apply_standardizer(std, dataset.project(test, indices))

    h_b = cfg.h_b if cfg.h_b is not None else plugin_bandwidth(xb.values)
    grid = bwselect.default_grid(xbs.n, xbs.d, cfg.grid_points, cfg.grid_lo, cfg.grid_hi)
    result = bwselect.sweep(xb, xbs, h_b, grid, index=cfg.index)
    bwselect.write_sweep_csv(result, os.path.join(out_dir, "sweep.csv"))
    report["bandwidth"] = {
        "h_b": h_b,
        "index": cfg.index,
        "m_b": result.m_b,
        "selected": result.selected,
        "reason": result.no_candidate_reason,
        "sweep_csv": "sweep.csv",
        "grid": [float(h) for h in grid.values],
    }
    if result.selected is None:
        return _finish_report(report, out_dir, "no-candidate-bandwidth", canonical)
    report["bandwidth"]["m_bs"] = result.selected_record().m_bs
    report["bandwidth"]["plateau_length"] = bwselect.plateau_length(result)

    partition = bwselect.final_partition(result, xbs)
    modes = partition.modes
    modal.write_partition_csv(partition, os.path.join(out_dir, "labels.csv"))
    _write_json(modes.to_dict(), os.path.join(out_dir, "modes.json"))
    sizes = [int((partition.labels == k).sum()) for k in range(1, len(modes) + 1)]
    report["partition"] = {
        "labels_csv": "labels.csv",
        "modes_json": "modes.json",
        "cluster_sizes": sizes,
        "n_unassigned": partition.n_unassigned,
    }

    h_t = cfg.h_test if cfg.h_test is not None else result.selected
    mt = modetest.test_modes(modes, xtest, h_t, alpha=cfg.alpha, n_boot=cfg.replicates, seed=seed)
    verdict = modetest.gate(mt, result.m_b)
    payload = mt.to_dict()
    payload["gate"] = verdict.to_dict()
    _write_json(payload, os.path.join(out_dir, "modetest.json"))
    report["mode_test"] = {
        "json": "modetest.json",
        "alpha": mt.alpha,
        "replicates": mt.n_boot,
        "bandwidth": mt.h,
        "gate": verdict.to_dict(),
        "modes": payload["modes"],
    }

    if ex_fit.truth is not None:
        report["evaluation"] = _evaluate_against_truth(ex_fit, partition)

    status = "signal-claim" if verdict.signal_claim else "no-signal-evidence"
    return _finish_report(report, out_dir, status, canonical)


def _evaluate_against_truth(ex_fit, partition):
    """Agreement of the final partition with the quarantined truth tags.

    The smallest assigned cluster plays the signal role (a collective
    anomaly is a minority by assumption); reported TPR is the fraction
    of truth-signal rows landing in it.
    """
    table = agreement.contingency(ex_fit.truth, partition.labels)
    block = {
        "contingency": table.counts.tolist(),
        "truth_labels": [int(v) for v in table.row_labels],
        "cluster_labels": [int(v) for v in table.col_labels],
        "fowlkes_mallows": float(agreement.fowlkes_mallows(table)),
    }
    assigned = [k for k in range(1, len(partition.modes) + 1)]
    sizes = {k: int((partition.labels == k).sum()) for k in assigned}
    signal_cluster = min(assigned, key=lambda k: (sizes[k], -k))
    block["signal_cluster"] = signal_cluster
    rows = list(table.row_labels)
    cols = list(table.col_labels)
    if dataset.SIGNAL in rows and signal_cluster in cols:
        block["true_positive_rate"] = float(
            agreement.true_positive_rate(
                table, rows.index(dataset.SIGNAL), cols.index(signal_cluster)
            )
        )
    else:
        block["true_positive_rate"] = None
    return block


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="modehunt",
        description="Semisupervised detection of collective signals as density modes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("select-vars", "run the variable-relevance screening"),
        ("detect", "run the full detection pipeline"),
        ("synth", "generate synthetic data files from the [synth] config"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="INI configuration file")
        p.add_argument("--seed", type=int, default=None, help="override [run] seed")
        p.add_argument("--out", default=None, help="override [run] out directory")
        p.add_argument(
            "--canonical-output",
            action="store_true",
            help="omit timestamps so identical runs give identical bytes",
        )
    return parser


_COMMANDS = {
    "select-vars": cmd_select_vars,
    "detect": cmd_detect,
    "synth": cmd_synth,
}


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.seed
        if seed < 0:
            raise ConfigError("seed must be nonnegative")
        out_dir = args.out if args.out is not None else cfg.out
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise DataError(f"cannot create output directory {out_dir}: {exc}") from None
        return _COMMANDS[args.command](cfg, out_dir, seed, args.canonical_output)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"input/output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
