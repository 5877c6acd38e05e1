"""20-vs-20 chunk classification restricted to voxel neighborhoods.

Per voxel and fold: draw a correct chunk start c and a wrong start w
(whose chunk may not overlap the correct one), restrict predicted and
recorded data to the voxel's neighborhood, and score the trial correct
iff the predicted chunk at c is strictly closer (Euclidean) to the
recorded chunk at c than the predicted chunk at w is. Repeated n_trials
times per voxel; every trial stream is keyed by (master_seed, fold,
voxel) so results never depend on evaluation order or worker count.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from ._validation import as_matrix

DEFAULT_CHUNK_LEN = 20
DEFAULT_N_TRIALS = 1000

THREADS_ENV = "BRAINALIGN_THREADS"


@dataclass(frozen=True)
class NeighborhoodMap:
    """Per-voxel neighbor index lists, each including its center voxel."""

    neighbors: tuple

    def __post_init__(self):
        nbs = tuple(tuple(int(i) for i in lst) for lst in self.neighbors)
        object.__setattr__(self, "neighbors", nbs)
        if len(nbs) == 0:
            raise ValueError("neighborhood map must not be empty")
        for center, lst in enumerate(nbs):
            if len(lst) == 0:
                raise ValueError(f"voxel {center} has an empty neighborhood")

    def __len__(self):
        return len(self.neighbors)

    def check_against(self, n_voxels):
        if len(self.neighbors) != n_voxels:
            raise ValueError(
                f"map covers {len(self.neighbors)} voxels, data has {n_voxels}"
            )
        for center, lst in enumerate(self.neighbors):
            if max(lst) >= n_voxels:
                raise ValueError(
                    f"voxel {center} lists neighbor {max(lst)} >= {n_voxels}"
                )


@dataclass(frozen=True)
class EvalConfig:
    """Searchlight evaluation knobs.

    ``tie_policy``: "incorrect" scores distance ties as wrong (strict
    less-than), "half" credits them 0.5. ``allow_overlap`` lets wrong
    chunks overlap the correct one (off by default; overlapping chunks
    make the comparison degenerate).
    """

    chunk_len: int = DEFAULT_CHUNK_LEN
    n_trials: int = DEFAULT_N_TRIALS
    master_seed: int = 0
    prng: str = rng.PRNG_ID
    tie_policy: str = "incorrect"
    allow_overlap: bool = False

    def __post_init__(self):
        if self.chunk_len < 1:
            raise ValueError(f"chunk_len must be >= 1, got {self.chunk_len}")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError("master_seed must fit in 64 bits")
        if self.prng != rng.PRNG_ID:
            raise ValueError(
                f"unsupported prng {self.prng!r}, only {rng.PRNG_ID!r} is implemented"
            )
        if self.tie_policy not in ("incorrect", "half"):
            raise ValueError(f"tie_policy must be 'incorrect' or 'half'")


def n_workers(workers=None):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def wrong_start_counts(c, n_rows, chunk_len):
    """(left, right) counts of non-overlapping wrong starts for correct start c.

    Valid wrong starts are [0, c - chunk_len] and [c + chunk_len,
    n_rows - chunk_len], either side possibly empty.
    """
    c = np.asarray(c)
    left = np.maximum(0, c - chunk_len + 1)
    right = np.maximum(0, (n_rows - chunk_len) - (c + chunk_len) + 1)
    return left, right


def draw_chunk_pairs(gen, n_rows, cfg):
    """Draw (correct, wrong) start arrays of length cfg.n_trials.

    Correct starts are uniform over [0, n_rows - chunk_len]. Wrong starts
    are uniform over the non-overlapping starts for that correct start;
    if a correct start admits none (possible when n_rows < 3*chunk_len - 1),
    it is redrawn.
    """
    L = cfg.chunk_len
    n_valid = n_rows - L + 1
    c = gen.integers(0, n_valid, size=cfg.n_trials)
    if cfg.allow_overlap:
        w = gen.integers(0, n_valid, size=cfg.n_trials)
        return c, w
    left, right = wrong_start_counts(c, n_rows, L)
    total = left + right
    while np.any(total == 0):
        bad = np.flatnonzero(total == 0)
        c[bad] = gen.integers(0, n_valid, size=bad.size)
        left, right = wrong_start_counts(c, n_rows, L)
        total = left + right
    j = gen.integers(0, total)
    w = np.where(j < left, j, c + L + (j - left))
    return c, w


def _voxel_accuracy(Y_true, Y_pred, nb_cols, cfg, fold, voxel, record=None):
    n_rows = Y_true.shape[0]
    L = cfg.chunk_len
    gen = rng.stream(cfg.master_seed, rng.TAG_SEARCHLIGHT, fold, voxel)
    c, w = draw_chunk_pairs(gen, n_rows, cfg)
    if record is not None:
        record[voxel] = (c.copy(), w.copy())
    T = Y_true[:, nb_cols]
    P = Y_pred[:, nb_cols]
    return _score_pairs(T, P, c, w, L, cfg.tie_policy), c.size


def _score_pairs(T, P, c, w, L, tie_policy):
    # Both distances must go through the *same* summation route: a
    # faster prefix-sum shortcut for the correct chunk changes the last
    # float bits and silently breaks exact distance ties.
    offsets = np.arange(L)
    widx = w[:, None] + offsets
    cidx = c[:, None] + offsets
    d_correct = ((P[cidx] - T[cidx]) ** 2).sum(axis=(1, 2))
    d_wrong = ((P[widx] - T[cidx]) ** 2).sum(axis=(1, 2))
    hits = np.count_nonzero(d_correct < d_wrong)
    if tie_policy == "half":
        return hits + 0.5 * np.count_nonzero(d_correct == d_wrong)
    return float(hits)


def classify_fold(Y_true, Y_pred, nb, cfg, fold=0, workers=None, record_draws=None):
    """Per-voxel 20v20 accuracy for one test fold.

    ``record_draws``, when a dict, receives ``voxel -> (c, w)`` start
    arrays for replay checks. Returns accuracies in [0, 1], each an exact
    multiple of 1/n_trials under the default tie policy.
    """
    Y_true = as_matrix(Y_true, "Y_true")
    Y_pred = as_matrix(Y_pred, "Y_pred")
    if Y_true.shape != Y_pred.shape:
        raise ValueError(
            f"shape mismatch: Y_true {Y_true.shape} vs Y_pred {Y_pred.shape}"
        )
    n_rows, n_voxels = Y_true.shape
    if 2 * cfg.chunk_len > n_rows:
        raise ValueError(
            f"2*chunk_len = {2 * cfg.chunk_len} exceeds fold length {n_rows}"
        )
    nb.check_against(n_voxels)
    nb_arrays = [np.asarray(lst, dtype=np.intp) for lst in nb.neighbors]
    acc = np.empty(n_voxels)

    def score(voxel):
        hits, n = _voxel_accuracy(
            Y_true, Y_pred, nb_arrays[voxel], cfg, fold, voxel, record_draws
        )
        acc[voxel] = hits / n

    k = n_workers(workers)
    if k == 1:
        for voxel in range(n_voxels):
            score(voxel)
    else:
        with ThreadPoolExecutor(max_workers=k) as pool:
            list(pool.map(score, range(n_voxels)))
    return acc


def replay_accuracy(Y_true, Y_pred, nb, draws, chunk_len, tie_policy="incorrect"):
    """Recompute per-voxel accuracy from recorded (c, w) draw arrays."""
    Y_true = as_matrix(Y_true, "Y_true")
    Y_pred = as_matrix(Y_pred, "Y_pred")
    acc = np.empty(len(draws))
    for voxel in sorted(draws):
        c, w = draws[voxel]
        cols = np.asarray(nb.neighbors[voxel], dtype=np.intp)
        hits = _score_pairs(
            Y_true[:, cols], Y_pred[:, cols], c, w, chunk_len, tie_policy
        )
        acc[voxel] = hits / c.size
    return acc


def read_neighborhoods(path):
    """Read a JSON-lines neighborhood file: one ``[center, [ids...]]`` per line."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if not (isinstance(obj, list) and len(obj) == 2):
                raise ValueError(
                    f"{path}:{line_no + 1}: expected [center, [neighbors...]]"
                )
            center, lst = obj
            entries[int(center)] = [int(i) for i in lst]
    if sorted(entries) != list(range(len(entries))):
        raise ValueError(f"{path}: centers must cover 0..n-1 exactly")
    return NeighborhoodMap(tuple(entries[i] for i in range(len(entries))))


def write_neighborhoods(path, nb):
    with open(path, "w", encoding="utf-8") as fh:
        for center, lst in enumerate(nb.neighbors):
            fh.write(json.dumps([center, list(lst)]) + "\n")
