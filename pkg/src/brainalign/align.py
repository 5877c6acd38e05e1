"""Word-to-TR alignment: pooling, lag concatenation, run-edge trimming.

Each fMRI volume (TR) spans 2 s while words appear every 0.5 s, so a TR
normally covers 4 words. Per-word feature rows are pooled into one row
per TR, past TRs are concatenated as lag blocks, and the transient TRs
at each run's edges are dropped from design and brain data identically.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, check_positive_int

# Stock acquisition: 4 runs totalling 1351 TRs, trimmed to 1211 by
# dropping 20 leading and 15 trailing TRs per run (20 + 15 = 35 each).
STOCK_N_RUNS = 4
STOCK_TOTAL_TRS = 1351
STOCK_TRIMMED_TRS = 1211
DEFAULT_TRIM_START = 20
DEFAULT_TRIM_END = 15

# Lag block count: the current TR plus the four before it.
DEFAULT_N_LAGS = 5

WORDS_PER_TR = 4


@dataclass(frozen=True)
class TimingTable:
    """Word index -> global 0-based TR index, non-decreasing."""

    word_trs: tuple

    def __post_init__(self):
        trs = tuple(int(t) for t in self.word_trs)
        object.__setattr__(self, "word_trs", trs)
        if len(trs) == 0:
            raise ValueError("timing table must not be empty")
        if any(t < 0 for t in trs):
            raise ValueError("TR indices must be >= 0")
        if any(b < a for a, b in zip(trs, trs[1:])):
            raise ValueError("TR indices must be non-decreasing")

    def __len__(self):
        return len(self.word_trs)

    def max_words_per_tr(self):
        _, counts = np.unique(np.array(self.word_trs), return_counts=True)
        return int(counts.max())


@dataclass(frozen=True)
class RunLayout:
    """Per-run TR counts plus the edge-trim policy."""

    run_lengths: tuple
    trim_start: int = DEFAULT_TRIM_START
    trim_end: int = DEFAULT_TRIM_END

    def __post_init__(self):
        lengths = tuple(int(r) for r in self.run_lengths)
        object.__setattr__(self, "run_lengths", lengths)
        if len(lengths) == 0:
            raise ValueError("run_lengths must not be empty")
        if any(r < 1 for r in lengths):
            raise ValueError("run lengths must be >= 1")
        if self.trim_start < 0 or self.trim_end < 0:
            raise ValueError("trim counts must be >= 0")
        if any(self.trim_start + self.trim_end >= r for r in lengths):
            raise ValueError(
                f"trim {self.trim_start}+{self.trim_end} leaves no rows in "
                f"some run of {lengths}"
            )

    @property
    def n_runs(self):
        return len(self.run_lengths)

    @property
    def total_trs(self):
        return sum(self.run_lengths)

    @property
    def trimmed_run_lengths(self):
        return tuple(
            r - self.trim_start - self.trim_end for r in self.run_lengths
        )

    @property
    def total_trimmed_trs(self):
        return sum(self.trimmed_run_lengths)

    def run_starts(self):
        starts = np.concatenate([[0], np.cumsum(self.run_lengths)[:-1]])
        return tuple(int(s) for s in starts)

    def kept_indices(self):
        """Global TR indices that survive trimming, in run order."""
        kept = []
        for start, length in zip(self.run_starts(), self.run_lengths):
            kept.extend(range(start + self.trim_start, start + length - self.trim_end))
        return np.array(kept, dtype=np.intp)

    def trimmed_fold_slices(self):
        """Row slices of the trimmed timeline, one per run."""
        slices = []
        offset = 0
        for length in self.trimmed_run_lengths:
            slices.append(slice(offset, offset + length))
            offset += length
        return tuple(slices)


def pool_words_to_tr(word_feats, timing, layout, pool="mean"):
    """Pool per-word feature rows into one row per TR.

    Row t is the mean of the rows of all words landing in TR t ("last"
    keeps the final word's row instead); TRs containing no words (rest
    periods) come out as all-zero rows.
    """
    word_feats = as_matrix(word_feats, "word_feats")
    if len(timing) != word_feats.shape[0]:
        raise ValueError(
            f"word_feats has {word_feats.shape[0]} rows but timing maps "
            f"{len(timing)} words"
        )
    n_trs = layout.total_trs
    trs = np.array(timing.word_trs, dtype=np.intp)
    if trs.max() >= n_trs:
        raise ValueError(
            f"timing refers to TR {trs.max()} but layout has only {n_trs} TRs"
        )
    if pool not in ("mean", "last"):
        raise ValueError(f"pool must be 'mean' or 'last', got {pool!r}")
    out = np.zeros((n_trs, word_feats.shape[1]))
    if pool == "mean":
        np.add.at(out, trs, word_feats)
        counts = np.bincount(trs, minlength=n_trs).astype(np.float64)
        nonzero = counts > 0
        out[nonzero] /= counts[nonzero, None]
    else:
        # later words overwrite earlier ones within a TR
        out[trs] = word_feats
    return out


def lag_concat(tr_feats, n_lags=DEFAULT_N_LAGS):
    """Concatenate each row with its n_lags-1 predecessors, oldest first.

    Rows with negative index are zero blocks. Lags run over the global
    timeline; rows contaminated across run boundaries are expected to be
    removed by the subsequent edge trim.
    """
    tr_feats = as_matrix(tr_feats, "tr_feats")
    n_lags = check_positive_int(n_lags, "n_lags")
    n, k = tr_feats.shape
    out = np.zeros((n, k * n_lags))
    for j in range(n_lags):
        # block j holds the row from (n_lags - 1 - j) steps back
        shift = n_lags - 1 - j
        out[shift:, j * k : (j + 1) * k] = tr_feats[: n - shift]
    return out


def trim_edges(mat, layout):
    """Drop each run's leading/trailing TRs; concatenate what remains."""
    mat = as_matrix(mat, "mat")
    if mat.shape[0] != layout.total_trs:
        raise ValueError(
            f"matrix has {mat.shape[0]} rows but layout covers "
            f"{layout.total_trs} TRs"
        )
    return mat[layout.kept_indices()]


def read_timing(path):
    """Read a `word_index,tr_index` CSV (header optional)."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            if row[0].strip() == "word_index":
                continue
            rows.append((int(row[0]), int(row[1])))
    rows.sort()
    if [i for i, _ in rows] != list(range(len(rows))):
        raise ValueError(f"word indices in {path} must cover 0..n-1 exactly")
    return TimingTable(tuple(t for _, t in rows))


def write_timing(path, timing):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word_index", "tr_index"])
        for i, t in enumerate(timing.word_trs):
            writer.writerow([i, t])


def read_layout(path):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return RunLayout(
        tuple(obj["run_lengths"]),
        trim_start=obj.get("trim_start", DEFAULT_TRIM_START),
        trim_end=obj.get("trim_end", DEFAULT_TRIM_END),
    )


def write_layout(path, layout):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "run_lengths": list(layout.run_lengths),
                "trim_start": layout.trim_start,
                "trim_end": layout.trim_end,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
