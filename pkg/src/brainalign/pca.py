"""Deterministic PCA via exact SVD with a fixed component sign rule.

Two fits on identical input must be bit-identical: no randomized solver,
and each component is flipped so that its largest-magnitude entry is
positive (ties resolved toward the lower index, which is what argmax
does). Exactness is cheap at this scale and buys reproducibility.
"""

import json

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import tensor_io
from ._validation import as_matrix

DEFAULT_N_COMPONENTS = 10


def _fix_signs(components):
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


class DeterministicPCA(BaseEstimator, TransformerMixin):
    """PCA with descending explained variance and deterministic signs.

    Attributes after fit: ``mean_`` (input-dim vector), ``components_``
    ([n_components x input dims], row-orthonormal), ``explained_variance_``
    (non-increasing).
    """

    def __init__(self, n_components=DEFAULT_N_COMPONENTS):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        n, d = X.shape
        k = self.n_components
        if n < 2:
            raise ValueError(f"need at least 2 rows to fit, got {n}")
        if not 1 <= k <= min(n, d):
            raise ValueError(
                f"n_components must be in [1, min(n, d)] = [1, {min(n, d)}], got {k}"
            )
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        self.components_ = _fix_signs(vt[:k])
        self.explained_variance_ = (s[:k] ** 2) / (n - 1)
        self.singular_values_ = s.copy()
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise ValueError("transform called before fit")
        X = as_matrix(X, "X")
        if X.shape[1] != self.components_.shape[1]:
            raise ValueError(
                f"X has {X.shape[1]} columns, model expects "
                f"{self.components_.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T

    def save(self, mean_path, components_path, meta_path=None):
        tensor_io.write_tensor(mean_path, self.mean_.shape, self.mean_)
        tensor_io.write_tensor(
            components_path, self.components_.shape, self.components_
        )
        if meta_path is not None:
            with open(meta_path, "w", encoding="utf-8") as fh:
                json.dump(
                    {
                        "n_components": int(self.components_.shape[0]),
                        "input_dims": int(self.components_.shape[1]),
                        "explained_variance": list(self.explained_variance_),
                    },
                    fh,
                    indent=2,
                )
                fh.write("\n")

    @classmethod
    def load(cls, mean_path, components_path):
        _, mean, _ = tensor_io.read_tensor(mean_path)
        _, components, _ = tensor_io.read_tensor(components_path)
        model = cls(n_components=components.shape[0])
        model.mean_ = mean.reshape(-1)
        model.components_ = components
        model.explained_variance_ = None
        return model
