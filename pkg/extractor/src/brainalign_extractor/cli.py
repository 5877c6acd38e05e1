"""Command line entry point."""

import argparse
import os
import sys

from . import extract as ex
from . import manifest


def build_parser():
    p = argparse.ArgumentParser(
        prog="brainalign-extract",
        description="Extract windowed per-layer hidden states to .btmx tensors.",
    )
    p.add_argument("--model", required=True, help="checkpoint name or path")
    p.add_argument("--words", required=True, help="word file, one token per line")
    p.add_argument("--windows", required=True, help="window file, one [start, end) per line")
    p.add_argument(
        "--scenario",
        required=True,
        help="scenario label the word file was prepared with (recorded as metadata)",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pool", default="final-word", choices=ex.POOL_MODES)
    p.add_argument(
        "--drop-pad",
        action="store_true",
        help="delete [PAD] words from the input instead of masking them",
    )
    p.add_argument("--device", default="cpu")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    job = ex.ExtractionJob(
        model_id=args.model,
        words_path=args.words,
        windows_path=args.windows,
        scenario=args.scenario,
        out_dir=args.out,
        pool=args.pool,
        drop_pad=args.drop_pad,
        device=args.device,
    )
    try:
        paths = ex.extract(job)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    from .btmx import read_tensor

    first, meta = read_tensor(paths[0])
    job_info = {
        "model": job.model_id,
        "scenario": job.scenario,
        "pool": job.pool,
        "n_layers": len(paths),
        "hidden": first.shape[1],
        "n_words": first.shape[0],
        "seq_length": int(meta["seq_length"]),
    }
    manifest.write_manifest(
        os.path.join(job.out_dir, "manifest.json"), paths, job_info
    )
    print(f"wrote {len(paths)} layer tensors to {job.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
