"""Voxelwise encoding pipeline with deterministic, desk-scale verification.

The package splits into small composable pieces:

- ``tensor_io``: the BTMX binary tensor exchange format (see FORMATS.md).
- ``textprep``: punctuation substitution scenarios and sliding-window specs.
- ``align``: word-to-TR pooling, lag concatenation, run-edge trimming.
- ``pca``: deterministic PCA with a fixed sign convention.
- ``ridge``: per-voxel ridge regression over a geometric lambda grid.
- ``searchlight``: neighborhood-restricted 20v20 chunk classification.
- ``synth``: synthetic data with known linear ground truth.
- ``pipeline``: cross-validated experiment orchestration and reports.
"""

from .pca import DeterministicPCA
from .ridge import LambdaGrid, RidgeEncoder
from .searchlight import EvalConfig, classify_fold

__version__ = "0.1.0"

__all__ = [
    "DeterministicPCA",
    "LambdaGrid",
    "RidgeEncoder",
    "EvalConfig",
    "classify_fold",
    "__version__",
]
