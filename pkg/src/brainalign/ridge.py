"""Per-voxel ridge regression over a geometric lambda grid.

One SVD of the design matrix is reused for the whole grid via the filter
factors s/(s^2 + lambda), so sweeping 19 lambdas costs barely more than
one least-squares solve and matches the normal-equation solution exactly
(up to float error). Lambda is selected per voxel by inner contiguous-
block cross-validation on the training rows; ties go to the larger
lambda (more shrinkage, deterministic).
"""

import json
from dataclasses import dataclass

import numpy as np

from . import tensor_io
from ._validation import as_matrix, check_finite

# 10**-9 .. 10**9, 19 values.
DEFAULT_LAMBDA_EXPONENTS = tuple(range(-9, 10))
DEFAULT_INNER_FOLDS = 5


@dataclass(frozen=True)
class LambdaGrid:
    """Strictly increasing integer exponents; lambda_i = 10**exponents[i]."""

    exponents: tuple = DEFAULT_LAMBDA_EXPONENTS

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(exps) == 0:
            raise ValueError("lambda grid must not be empty")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError(f"exponents must be strictly increasing: {exps}")

    @property
    def values(self):
        return tuple(10.0**e for e in self.exponents)

    def __len__(self):
        return len(self.exponents)


def ridge_path(X, Y, grid=LambdaGrid()):
    """Solve min ||Y - XW||^2 + lambda ||W||^2 for every lambda in the grid.

    Expects X standardized and Y centered by the caller. Returns an array
    of shape [len(grid), d, v], one weight stack per lambda.
    """
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    check_finite(X, "X")
    check_finite(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ValueError(
            f"X has {X.shape[0]} rows, Y has {Y.shape[0]}"
        )
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    uty = u.T @ Y
    out = np.empty((len(grid), X.shape[1], Y.shape[1]))
    for i, lam in enumerate(grid.values):
        filt = s / (s**2 + lam)
        out[i] = vt.T @ (filt[:, None] * uty)
    return out


def _contiguous_folds(n_rows, n_folds):
    """Index blocks [start, stop) splitting 0..n_rows into contiguous folds."""
    edges = np.linspace(0, n_rows, n_folds + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def select_lambda(X_train, Y_train, grid=LambdaGrid(), inner_folds=DEFAULT_INNER_FOLDS):
    """Pick the per-voxel exponent minimizing mean inner-CV squared error.

    Folds are contiguous blocks of the training rows (time respects
    autocorrelation, so no shuffling). Ties break toward the larger
    lambda. Zero-variance voxels are forced to the largest lambda and
    reported back so callers can flag them.

    Returns ``(exponents [v], degenerate_voxel_indices)``.
    """
    X_train = as_matrix(X_train, "X_train")
    Y_train = as_matrix(Y_train, "Y_train")
    if inner_folds < 2:
        raise ValueError(f"inner_folds must be >= 2, got {inner_folds}")
    n = X_train.shape[0]
    if n < inner_folds:
        raise ValueError(f"{n} rows cannot be split into {inner_folds} folds")
    n_voxels = Y_train.shape[1]
    mse = np.zeros((len(grid), n_voxels))
    folds = _contiguous_folds(n, inner_folds)
    for start, stop in folds:
        val = slice(start, stop)
        fit_idx = np.concatenate([np.arange(0, start), np.arange(stop, n)])
        weights = ridge_path(X_train[fit_idx], Y_train[fit_idx], grid)
        for i in range(len(grid)):
            pred = X_train[val] @ weights[i]
            mse[i] += ((pred - Y_train[val]) ** 2).mean(axis=0)
    mse /= len(folds)
    # argmin on the reversed grid keeps the largest lambda among ties
    rev_best = np.argmin(mse[::-1], axis=0)
    chosen = np.array(grid.exponents[::-1])[rev_best]
    degenerate = np.flatnonzero(Y_train.std(axis=0) == 0.0)
    chosen[degenerate] = grid.exponents[-1]
    return chosen, degenerate


class RidgeEncoder:
    """Voxelwise ridge with per-voxel lambda selection, sklearn-style.

    ``fit(X, Y)`` z-scores features and centers each voxel's response
    with training statistics, runs the inner-CV lambda search, then
    assembles one weight column per voxel from the full-training-rows
    SVD path. ``predict`` applies the stored statistics, so test rows
    never influence the fit.
    """

    def __init__(self, grid=LambdaGrid(), inner_folds=DEFAULT_INNER_FOLDS):
        self.grid = grid
        self.inner_folds = inner_folds

    def get_params(self, deep=True):
        return {"grid": self.grid, "inner_folds": self.inner_folds}

    def set_params(self, **params):
        for key, value in params.items():
            if key not in ("grid", "inner_folds"):
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, X, Y):
        X = as_matrix(X, "X")
        Y = as_matrix(Y, "Y")
        check_finite(X, "X")
        check_finite(Y, "Y")
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
        self.feature_mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0.0] = 1.0  # constant features pass through centered
        self.feature_std_ = std
        self.response_mean_ = Y.mean(axis=0)
        Xz = (X - self.feature_mean_) / self.feature_std_
        Yc = Y - self.response_mean_
        chosen, degenerate = select_lambda(Xz, Yc, self.grid, self.inner_folds)
        self.chosen_exponent_ = chosen
        self.degenerate_voxels_ = degenerate
        path = ridge_path(Xz, Yc, self.grid)
        exps = np.array(self.grid.exponents)
        weights = np.empty((X.shape[1], Y.shape[1]))
        for i, e in enumerate(exps):
            cols = chosen == e
            if np.any(cols):
                weights[:, cols] = path[i][:, cols]
        self.weights_ = weights
        return self

    def predict(self, X):
        X = as_matrix(X, "X")
        if X.shape[1] != self.weights_.shape[0]:
            raise ValueError(
                f"X has {X.shape[1]} columns, fit used {self.weights_.shape[0]}"
            )
        Xz = (X - self.feature_mean_) / self.feature_std_
        return Xz @ self.weights_ + self.response_mean_

    def save(self, weights_path, meta_path):
        tensor_io.write_tensor(weights_path, self.weights_.shape, self.weights_)
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "chosen_exponent": [int(e) for e in self.chosen_exponent_],
                    "degenerate_voxels": [int(i) for i in self.degenerate_voxels_],
                    "feature_mean": list(self.feature_mean_),
                    "feature_std": list(self.feature_std_),
                    "response_mean": list(self.response_mean_),
                    "grid_exponents": list(self.grid.exponents),
                },
                fh,
            )
            fh.write("\n")


def r_squared(Y_true, Y_pred):
    """Per-voxel coefficient of determination on held-out rows."""
    Y_true = as_matrix(Y_true, "Y_true")
    Y_pred = as_matrix(Y_pred, "Y_pred")
    ss_res = ((Y_true - Y_pred) ** 2).sum(axis=0)
    ss_tot = ((Y_true - Y_true.mean(axis=0)) ** 2).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = 1.0 - ss_res / ss_tot
    return np.where(ss_tot == 0.0, 0.0, r2)
