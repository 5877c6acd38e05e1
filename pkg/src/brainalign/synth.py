"""Synthetic data with known linear ground truth.

The generator plays the role of the real corpus, checkpoints, and
scanner: Gaussian per-word features are pooled and lagged exactly the
way the pipeline does it, multiplied by a known weight matrix, and
Gaussian noise is added on top. Everything downstream can then be
verified against analytically predictable recovery statistics, and the
true weights are persisted for oracle checks. All draws come from keyed
Philox streams, so one seed fixes every byte of output.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import align, rng, searchlight, tensor_io
from .ridge import DEFAULT_LAMBDA_EXPONENTS

# synth stream kinds
_WORDS = 0
_WEIGHTS = 1
_BRAIN = 2
_LAYER = 3


@dataclass(frozen=True)
class SynthSpec:
    run_lengths: tuple = (100, 100, 100, 100)
    words_per_tr: int = align.WORDS_PER_TR
    n_voxels: int = 50
    k_latent: int = 10
    noise_sigma: float = 1.0
    snr: float = None
    signal_scale: float = 1.0
    weight_density: float = 1.0
    seed: int = 0
    n_layers: int = 1
    layer_noise: float = 0.5
    n_lags: int = align.DEFAULT_N_LAGS
    trim_start: int = align.DEFAULT_TRIM_START
    trim_end: int = align.DEFAULT_TRIM_END
    seq_length: int = 4
    subjects: tuple = ("sub01",)
    neighborhood_style: str = "box"

    def __post_init__(self):
        object.__setattr__(self, "run_lengths", tuple(self.run_lengths))
        object.__setattr__(self, "subjects", tuple(self.subjects))
        if self.neighborhood_style not in ("box", "identity"):
            raise ValueError("neighborhood_style must be 'box' or 'identity'")
        if min(self.run_lengths, default=0) < 1:
            raise ValueError("run_lengths must all be >= 1")
        for name in ("words_per_tr", "n_voxels", "k_latent", "n_layers", "n_lags"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.snr is not None:
            if self.snr <= 0:
                raise ValueError("snr must be > 0")
            if self.signal_scale == 0:
                raise ValueError("snr is meaningless with signal_scale 0")
        elif self.noise_sigma is None:
            raise ValueError("one of noise_sigma or snr must be set")
        if not 0 < self.weight_density <= 1:
            raise ValueError("weight_density must be in (0, 1]")
        if not self.subjects:
            raise ValueError("need at least one subject")

    @property
    def n_words(self):
        return sum(self.run_lengths) * self.words_per_tr

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(**obj)


@dataclass
class SynthBundle:
    spec: SynthSpec
    word_feats: np.ndarray
    layer_feats: dict
    timing: align.TimingTable
    layout: align.RunLayout
    neighborhoods: searchlight.NeighborhoodMap
    brains: dict
    true_weights: np.ndarray
    noise_sigmas: np.ndarray = field(default=None)


def identity_neighborhoods(n_voxels):
    """Radius-0 searchlight: every voxel is scored alone.

    Overlapping neighborhoods correlate voxel scores, which is fine for
    real analyses but ruins variance estimates in calibration checks, so
    those use this style instead.
    """
    return searchlight.NeighborhoodMap(tuple((i,) for i in range(n_voxels)))


def grid_neighborhoods(n_voxels):
    """Voxels on a near-cubic 3-D integer grid; neighborhood = 3x3x3 box."""
    nx = int(np.ceil(n_voxels ** (1 / 3)))
    ny = int(np.ceil(np.sqrt(n_voxels / nx)))
    nz = int(np.ceil(n_voxels / (nx * ny)))
    coords = [
        (x, y, z)
        for x in range(nx)
        for y in range(ny)
        for z in range(nz)
    ][:n_voxels]
    index = {c: i for i, c in enumerate(coords)}
    neighbors = []
    for x, y, z in coords:
        lst = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    j = index.get((x + dx, y + dy, z + dz))
                    if j is not None:
                        lst.append(j)
        neighbors.append(sorted(lst))
    return searchlight.NeighborhoodMap(tuple(neighbors))


def generate(spec):
    """Build the full synthetic bundle for ``spec``.

    Brain data per subject is ``signal_scale * design @ W_true`` plus
    Gaussian noise; the design is the pooled and lagged word-feature
    matrix over the untrimmed timeline, so the pipeline's own alignment
    reproduces it exactly (up to the PCA rotation).
    """
    n_trs = sum(spec.run_lengths)
    timing = align.TimingTable(
        tuple(i // spec.words_per_tr for i in range(spec.n_words))
    )
    layout = align.RunLayout(
        spec.run_lengths, trim_start=spec.trim_start, trim_end=spec.trim_end
    )
    word_feats = rng.stream(spec.seed, rng.TAG_SYNTH, _WORDS).standard_normal(
        (spec.n_words, spec.k_latent)
    )
    weights = rng.stream(spec.seed, rng.TAG_SYNTH, _WEIGHTS).standard_normal(
        (spec.k_latent * spec.n_lags, spec.n_voxels)
    )
    if spec.weight_density < 1.0:
        keep = rng.stream(spec.seed, rng.TAG_SYNTH, _WEIGHTS, 1).random(
            weights.shape
        ) < spec.weight_density
        weights = weights * keep
    design = align.lag_concat(
        align.pool_words_to_tr(word_feats, timing, layout), spec.n_lags
    )
    signal = spec.signal_scale * (design @ weights)
    if spec.snr is not None:
        sigmas = signal.std(axis=0) / np.sqrt(spec.snr)
    else:
        sigmas = np.full(spec.n_voxels, float(spec.noise_sigma))
    brains = {}
    for si, subject in enumerate(spec.subjects):
        noise = rng.stream(spec.seed, rng.TAG_SYNTH, _BRAIN, si).standard_normal(
            (n_trs, spec.n_voxels)
        )
        brains[subject] = signal + sigmas * noise
    layer_feats = {0: word_feats}
    for layer in range(1, spec.n_layers):
        extra = rng.stream(spec.seed, rng.TAG_SYNTH, _LAYER, layer).standard_normal(
            word_feats.shape
        )
        layer_feats[layer] = word_feats + layer * spec.layer_noise * extra
    if spec.neighborhood_style == "identity":
        nb = identity_neighborhoods(spec.n_voxels)
    else:
        nb = grid_neighborhoods(spec.n_voxels)
    return SynthBundle(
        spec=spec,
        word_feats=word_feats,
        layer_feats=layer_feats,
        timing=timing,
        layout=layout,
        neighborhoods=nb,
        brains=brains,
        true_weights=weights,
        noise_sigmas=sigmas,
    )


def write_bundle(bundle, out_dir):
    """Write the bundle as the exact file set the pipeline consumes.

    Also drops a ready-to-run ``exp.json`` pointing at the files (paths
    relative to the config location).
    """
    spec = bundle.spec
    feat_dir = os.path.join(out_dir, "features", "synth", "none", f"S{spec.seq_length}")
    os.makedirs(feat_dir, exist_ok=True)
    for directory in ("brain", "timing", "layout", "neighborhoods"):
        os.makedirs(os.path.join(out_dir, directory), exist_ok=True)
    for layer, feats in bundle.layer_feats.items():
        tensor_io.write_tensor(
            os.path.join(feat_dir, f"layer{layer:02d}.btmx"),
            feats.shape,
            feats,
            meta={
                "model": "synth",
                "layer": str(layer),
                "scenario": "none",
                "seq_length": str(spec.seq_length),
            },
        )
    for subject, brain in bundle.brains.items():
        tensor_io.write_tensor(
            os.path.join(out_dir, "brain", f"{subject}.btmx"),
            brain.shape,
            brain,
            meta={"subject": subject},
        )
        align.write_timing(
            os.path.join(out_dir, "timing", f"{subject}.csv"), bundle.timing
        )
        align.write_layout(
            os.path.join(out_dir, "layout", f"{subject}.json"), bundle.layout
        )
        searchlight.write_neighborhoods(
            os.path.join(out_dir, "neighborhoods", f"{subject}.jsonl"),
            bundle.neighborhoods,
        )
    tensor_io.write_tensor(
        os.path.join(out_dir, "true_weights.btmx"),
        bundle.true_weights.shape,
        bundle.true_weights,
        meta={"n_lags": str(spec.n_lags), "k_latent": str(spec.k_latent)},
    )
    config = {
        "out_dir": "results",
        "subjects": list(spec.subjects),
        "models": {"synth": spec.n_layers},
        "seq_lengths": [spec.seq_length],
        "scenarios": ["none"],
        "paths": {
            "features": "features/{model}/{scenario}/S{S}/layer{layer:02d}.btmx",
            "brain": "brain/{subject}.btmx",
            "timing": "timing/{subject}.csv",
            "layout": "layout/{subject}.json",
            "neighborhoods": "neighborhoods/{subject}.jsonl",
        },
        "lambda_exponents": list(DEFAULT_LAMBDA_EXPONENTS),
        "inner_folds": 5,
        "n_lags": spec.n_lags,
        "pool": "mean",
        "pca_components": min(10, spec.k_latent),
        "pca_per_fold": False,
        "eval": {
            # Clamp so the template runs on small geometries; the
            # classifier needs two disjoint chunks per fold.
            "chunk_len": min(
                searchlight.DEFAULT_CHUNK_LEN,
                min(bundle.layout.trimmed_run_lengths) // 2,
            ),
            "n_trials": searchlight.DEFAULT_N_TRIALS,
            "master_seed": spec.seed,
            "prng": rng.PRNG_ID,
            "tie_policy": "incorrect",
            "allow_overlap": False,
        },
        "averaging_order": "voxels_folds_subjects",
    }
    config_path = os.path.join(out_dir, "exp.json")
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return config_path
