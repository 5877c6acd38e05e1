"""Input validation helpers shared across the package."""

import numpy as np


def as_matrix(X, name="X", dtype=np.float64):
    """Coerce to a 2-D float array, rejecting anything else."""
    X = np.asarray(X, dtype=dtype)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={X.ndim}")
    return X


def check_finite(X, name="X"):
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")


def check_positive_int(value, name):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)
