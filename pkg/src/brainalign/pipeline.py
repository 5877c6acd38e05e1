"""Cross-validated experiment orchestration.

A cell is one (model, layer, sequence length, scenario, subject)
combination. Per cell the runner reduces word features, aligns them to
TRs, fits the per-voxel ridge on the training runs of each fold,
predicts the held-out run, and scores it with the searchlight. Folds
equal runs: run r is the test set of fold r.

Everything is deterministic given the config and its master seed: cells
are enumerated in a fixed order, all randomness is keyed Philox, rows
are sorted before writing, and floats are serialized via repr.
"""

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import align, searchlight, tensor_io
from .pca import DeterministicPCA
from .plots import accuracy_plot_svg
from .ridge import DEFAULT_INNER_FOLDS, LambdaGrid, RidgeEncoder

RESULT_FIELDS = (
    "model",
    "scenario",
    "seq_length",
    "layer",
    "subject",
    "fold",
    "mean_voxel_accuracy",
)

DEFAULT_PATHS = {
    "features": "features/{model}/{scenario}/S{S}/layer{layer:02d}.btmx",
    "brain": "brain/{subject}.btmx",
    "timing": "timing/{subject}.csv",
    "layout": "layout/{subject}.json",
    "neighborhoods": "neighborhoods/{subject}.jsonl",
}

AVERAGING_ORDERS = ("voxels_folds_subjects", "pooled")


class Cell(NamedTuple):
    model: str
    layer: int
    seq_length: int
    scenario: str
    subject: str

    def key(self):
        return f"{self.model}|{self.scenario}|S{self.seq_length}|L{self.layer}|{self.subject}"


@dataclass(frozen=True)
class ExperimentConfig:
    base_dir: str
    out_dir: str
    subjects: tuple
    models: dict  # model id -> layer count
    seq_lengths: tuple
    scenarios: tuple
    paths: dict
    eval: searchlight.EvalConfig
    grid: LambdaGrid = LambdaGrid()
    inner_folds: int = DEFAULT_INNER_FOLDS
    n_lags: int = align.DEFAULT_N_LAGS
    pool: str = "mean"
    pca_components: int = 10
    pca_per_fold: bool = False
    averaging_order: str = "voxels_folds_subjects"
    raw: dict = None

    def __post_init__(self):
        if self.averaging_order not in AVERAGING_ORDERS:
            raise ValueError(
                f"averaging_order must be one of {AVERAGING_ORDERS}, "
                f"got {self.averaging_order!r}"
            )
        if not self.subjects or not self.models or not self.seq_lengths:
            raise ValueError("subjects, models and seq_lengths must be non-empty")
        for scenario in self.scenarios:
            from .textprep import SCENARIO_IDS

            if scenario not in SCENARIO_IDS:
                raise ValueError(f"unknown scenario {scenario!r}")

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        base_dir = os.path.dirname(os.path.abspath(path))
        ev = obj.get("eval", {})
        return cls(
            base_dir=base_dir,
            out_dir=obj.get("out_dir", "results"),
            subjects=tuple(obj["subjects"]),
            models=dict(obj["models"]),
            seq_lengths=tuple(obj["seq_lengths"]),
            scenarios=tuple(obj.get("scenarios", ["none"])),
            paths={**DEFAULT_PATHS, **obj.get("paths", {})},
            eval=searchlight.EvalConfig(
                chunk_len=ev.get("chunk_len", searchlight.DEFAULT_CHUNK_LEN),
                n_trials=ev.get("n_trials", searchlight.DEFAULT_N_TRIALS),
                master_seed=ev.get("master_seed", 0),
                prng=ev.get("prng", "philox4x64-10"),
                tie_policy=ev.get("tie_policy", "incorrect"),
                allow_overlap=ev.get("allow_overlap", False),
            ),
            grid=LambdaGrid(tuple(obj.get("lambda_exponents", range(-9, 10)))),
            inner_folds=obj.get("inner_folds", DEFAULT_INNER_FOLDS),
            n_lags=obj.get("n_lags", align.DEFAULT_N_LAGS),
            pool=obj.get("pool", "mean"),
            pca_components=obj.get("pca_components", 10),
            pca_per_fold=obj.get("pca_per_fold", False),
            averaging_order=obj.get("averaging_order", "voxels_folds_subjects"),
            raw=obj,
        )

    def config_hash(self):
        blob = json.dumps(self.raw or {}, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def cells(self):
        out = []
        for model, n_layers in self.models.items():
            for scenario in self.scenarios:
                for seq_length in self.seq_lengths:
                    for layer in range(int(n_layers)):
                        for subject in self.subjects:
                            out.append(
                                Cell(model, layer, seq_length, scenario, subject)
                            )
        return out

    def cell_paths(self, cell):
        subs = {
            "model": cell.model,
            "scenario": cell.scenario,
            "S": cell.seq_length,
            "layer": cell.layer,
            "subject": cell.subject,
        }
        resolved = {}
        for kind, template in self.paths.items():
            resolved[kind] = os.path.join(self.base_dir, template.format(**subs))
        return resolved

    def validate_files(self):
        missing = []
        for cell in self.cells():
            for kind, path in self.cell_paths(cell).items():
                if not os.path.exists(path):
                    missing.append(f"{cell.key()}: {kind} -> {path}")
        if missing:
            raise FileNotFoundError(
                "missing input files:\n" + "\n".join(sorted(set(missing)))
            )

    def resolve_out_dir(self):
        return os.path.join(self.base_dir, self.out_dir)


@dataclass
class CellData:
    features: np.ndarray
    timing: align.TimingTable
    layout: align.RunLayout
    brain: np.ndarray
    neighborhoods: searchlight.NeighborhoodMap


def load_cell(cfg, cell):
    paths = cfg.cell_paths(cell)
    _, features, _ = tensor_io.read_tensor(paths["features"])
    if "feature_manifest" in paths:
        from .manifest import verify_file

        verify_file(paths["feature_manifest"], paths["features"])
    _, brain, _ = tensor_io.read_tensor(paths["brain"])
    timing = align.read_timing(paths["timing"])
    layout = align.read_layout(paths["layout"])
    nb = searchlight.read_neighborhoods(paths["neighborhoods"])
    if features.shape[0] != len(timing):
        raise ValueError(
            f"{cell.key()}: features have {features.shape[0]} rows but timing "
            f"maps {len(timing)} words"
        )
    if brain.shape[0] != layout.total_trs:
        raise ValueError(
            f"{cell.key()}: brain has {brain.shape[0]} TRs, layout expects "
            f"{layout.total_trs}"
        )
    nb.check_against(brain.shape[1])
    return CellData(features, timing, layout, brain, nb)


def _train_word_mask(timing, layout, fold):
    """Words whose TR lies outside the test run (untrimmed boundaries)."""
    starts = layout.run_starts()
    lo = starts[fold]
    hi = lo + layout.run_lengths[fold]
    trs = np.array(timing.word_trs)
    return (trs < lo) | (trs >= hi)


def build_design(cfg, data, fold=None):
    """PCA-reduce, pool, lag and trim the cell's features.

    With ``pca_per_fold`` the reduction is fit on training-run words only
    (``fold`` required); the default fits on the full word-feature matrix.
    """
    k = min(cfg.pca_components, data.features.shape[1])
    pca = DeterministicPCA(n_components=k)
    if cfg.pca_per_fold:
        if fold is None:
            raise ValueError("pca_per_fold requires a fold index")
        pca.fit(data.features[_train_word_mask(data.timing, data.layout, fold)])
    else:
        pca.fit(data.features)
    scores = pca.transform(data.features)
    pooled = align.pool_words_to_tr(scores, data.timing, data.layout, pool=cfg.pool)
    lagged = align.lag_concat(pooled, cfg.n_lags)
    return align.trim_edges(lagged, data.layout)


def fit_fold_model(design, brain, fold, layout, grid, inner_folds):
    """Fit the encoder on all trimmed rows outside the test run.

    Takes only train-slice views, so poisoned test rows can never reach
    the fit; the leakage audit relies on that.
    """
    slices = layout.trimmed_fold_slices()
    if not 0 <= fold < len(slices):
        raise ValueError(f"fold {fold} out of range for {len(slices)} runs")
    test = slices[fold]
    n = sum(layout.trimmed_run_lengths)
    train_idx = np.concatenate(
        [np.arange(test.start), np.arange(test.stop, n)]
    )
    enc = RidgeEncoder(grid=grid, inner_folds=inner_folds)
    enc.fit(design[train_idx], brain[train_idx])
    return enc, test


def run_fold(cfg, cell, fold, data=None, workers=None):
    """Execute reduce -> align -> ridge -> predict -> searchlight for one fold."""
    if data is None:
        data = load_cell(cfg, cell)
    design = build_design(cfg, data, fold=fold)
    brain = align.trim_edges(data.brain, data.layout)
    enc, test = fit_fold_model(
        design, brain, fold, data.layout, cfg.grid, cfg.inner_folds
    )
    pred = enc.predict(design[test])
    return searchlight.classify_fold(
        brain[test], pred, data.neighborhoods, cfg.eval, fold=fold, workers=workers
    )


def run_cell(cfg, cell, data=None, workers=None):
    """Per-voxel accuracy for every fold: array [n_voxels x n_folds]."""
    if data is None:
        data = load_cell(cfg, cell)
    n_folds = data.layout.n_runs
    if not cfg.pca_per_fold:
        design = build_design(cfg, data)
        brain = align.trim_edges(data.brain, data.layout)
        cols = []
        for fold in range(n_folds):
            enc, test = fit_fold_model(
                design, brain, fold, data.layout, cfg.grid, cfg.inner_folds
            )
            pred = enc.predict(design[test])
            cols.append(
                searchlight.classify_fold(
                    brain[test],
                    pred,
                    data.neighborhoods,
                    cfg.eval,
                    fold=fold,
                    workers=workers,
                )
            )
        return np.stack(cols, axis=1)
    return np.stack(
        [run_fold(cfg, cell, fold, data=data, workers=workers) for fold in range(n_folds)],
        axis=1,
    )


def _acc_file(cell):
    safe = cell.key().replace("/", "-").replace("|", "_")
    return os.path.join("acc", f"{safe}.btmx")


def run_experiment(cfg, workers=None, log=None):
    """Run every cell, resumably, and write results.csv plus a manifest."""
    cfg.validate_files()
    out_dir = cfg.resolve_out_dir()
    os.makedirs(os.path.join(out_dir, "acc"), exist_ok=True)
    manifest_path = os.path.join(out_dir, "manifest.json")
    manifest = {"config_hash": cfg.config_hash(), "cells": {}}
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            old = json.load(fh)
        if old.get("config_hash") == manifest["config_hash"]:
            manifest = old
    rows = []
    for cell in cfg.cells():
        entry = manifest["cells"].get(cell.key())
        acc_rel = _acc_file(cell)
        if entry is None or not os.path.exists(os.path.join(out_dir, acc_rel)):
            if log:
                log(f"running {cell.key()}")
            acc = run_cell(cfg, cell, workers=workers)
            tensor_io.write_tensor(
                os.path.join(out_dir, acc_rel),
                acc.shape,
                acc,
                meta={
                    "model": cell.model,
                    "scenario": cell.scenario,
                    "seq_length": str(cell.seq_length),
                    "layer": str(cell.layer),
                    "subject": cell.subject,
                    "n_trials": str(cfg.eval.n_trials),
                    "chunk_len": str(cfg.eval.chunk_len),
                    "master_seed": str(cfg.eval.master_seed),
                    "prng": cfg.eval.prng,
                    "averaging_order": cfg.averaging_order,
                },
            )
            entry = {
                "file": acc_rel,
                "fold_means": [float(m) for m in acc.mean(axis=0)],
            }
            manifest["cells"][cell.key()] = entry
            with open(manifest_path, "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True)
                fh.write("\n")
        elif log:
            log(f"skipping {cell.key()} (already complete)")
        for fold, mean_acc in enumerate(entry["fold_means"]):
            rows.append(
                {
                    "model": cell.model,
                    "scenario": cell.scenario,
                    "seq_length": cell.seq_length,
                    "layer": cell.layer,
                    "subject": cell.subject,
                    "fold": fold,
                    "mean_voxel_accuracy": mean_acc,
                }
            )
    write_results_csv(os.path.join(out_dir, "results.csv"), rows)
    return rows


def _row_sort_key(row):
    return (
        row["model"],
        row["scenario"],
        int(row["seq_length"]),
        int(row["layer"]),
        row["subject"],
        int(row["fold"]),
    )


def write_results_csv(path, rows):
    rows = sorted(rows, key=_row_sort_key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_FIELDS)
        for row in rows:
            writer.writerow([str(row[f]) for f in RESULT_FIELDS])


def read_results_csv(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            row["seq_length"] = int(row["seq_length"])
            row["layer"] = int(row["layer"])
            row["fold"] = int(row["fold"])
            row["mean_voxel_accuracy"] = float(row["mean_voxel_accuracy"])
            rows.append(row)
    return rows


def aggregate(rows):
    """Fold the per-fold rows down to the report tables.

    Produces both averaging orders, because the choice changes nothing
    for balanced designs but is otherwise material: ``subject_mean``
    averages folds within subject first, then subjects; ``pooled``
    averages all (subject, fold) rows in one go.
    """
    if not rows:
        raise ValueError("no rows to aggregate")
    per_subject = {}
    for row in rows:
        key = (
            row["model"],
            row["scenario"],
            row["seq_length"],
            row["layer"],
            row["subject"],
        )
        per_subject.setdefault(key, []).append(row["mean_voxel_accuracy"])
    per_subject_rows = [
        {
            "model": m,
            "scenario": sc,
            "seq_length": s,
            "layer": l,
            "subject": sub,
            "mean_accuracy": float(np.mean(vals)),
            "n_folds": len(vals),
        }
        for (m, sc, s, l, sub), vals in sorted(per_subject.items())
    ]
    overall = {}
    for row in per_subject_rows:
        key = (row["model"], row["scenario"], row["seq_length"], row["layer"])
        overall.setdefault(key, []).append(row["mean_accuracy"])
    pooled = {}
    for row in rows:
        key = (row["model"], row["scenario"], row["seq_length"], row["layer"])
        pooled.setdefault(key, []).append(row["mean_voxel_accuracy"])
    overall_rows = [
        {
            "model": m,
            "scenario": sc,
            "seq_length": s,
            "layer": l,
            "accuracy_subject_mean": float(np.mean(overall[(m, sc, s, l)])),
            "accuracy_pooled": float(np.mean(pooled[(m, sc, s, l)])),
            "n_rows": len(pooled[(m, sc, s, l)]),
        }
        for (m, sc, s, l) in sorted(overall)
    ]
    return overall_rows, per_subject_rows


def _write_table(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([str(row[f]) for f in fieldnames])


def write_report(rows, report_dir, averaging_order="voxels_folds_subjects"):
    """Emit aggregate tables and one SVG per (model, scenario)."""
    overall_rows, per_subject_rows = aggregate(rows)
    os.makedirs(report_dir, exist_ok=True)
    _write_table(
        os.path.join(report_dir, "aggregate.csv"),
        (
            "model",
            "scenario",
            "seq_length",
            "layer",
            "accuracy_subject_mean",
            "accuracy_pooled",
            "n_rows",
        ),
        overall_rows,
    )
    _write_table(
        os.path.join(report_dir, "per_subject.csv"),
        ("model", "scenario", "seq_length", "layer", "subject", "mean_accuracy", "n_folds"),
        per_subject_rows,
    )
    acc_field = (
        "accuracy_subject_mean"
        if averaging_order == "voxels_folds_subjects"
        else "accuracy_pooled"
    )
    plots = []
    groups = {}
    for row in overall_rows:
        groups.setdefault((row["model"], row["scenario"]), []).append(row)
    for (model, scenario), grp in sorted(groups.items()):
        series = {}
        for row in grp:
            series.setdefault(row["seq_length"], []).append(
                (row["layer"], row[acc_field])
            )
        series = {s: sorted(pts) for s, pts in sorted(series.items())}
        svg = accuracy_plot_svg(series, title=f"{model} / {scenario}")
        safe = f"{model}_{scenario}".replace("/", "-")
        path = os.path.join(report_dir, f"plot_{safe}.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
        plots.append(path)
    return plots
