"""Command line entry points.

    brainalign synth    --spec synth.json --out data/
    brainalign run      --config data/exp.json
    brainalign report   --in results/ --out report/
    brainalign textprep --words words.txt --scenario padding_all --out out.txt
"""

import argparse
import os
import sys

from . import pipeline, synth, textprep


def _cmd_synth(args):
    spec = synth.SynthSpec.from_json(args.spec)
    bundle = synth.generate(spec)
    config_path = synth.write_bundle(bundle, args.out)
    print(f"wrote synthetic dataset to {args.out}")
    print(f"config template: {config_path}")
    return 0


def _cmd_run(args):
    cfg = pipeline.ExperimentConfig.from_json(args.config)
    log = print if not args.quiet else None
    rows = pipeline.run_experiment(cfg, workers=args.workers, log=log)
    out_dir = cfg.resolve_out_dir()
    print(f"{len(rows)} result rows -> {os.path.join(out_dir, 'results.csv')}")
    return 0


def _cmd_report(args):
    results_csv = os.path.join(args.results_dir, "results.csv")
    if not os.path.exists(results_csv):
        print(f"no results.csv under {args.results_dir}", file=sys.stderr)
        return 2
    rows = pipeline.read_results_csv(results_csv)
    plots = pipeline.write_report(rows, args.out, averaging_order=args.averaging_order)
    print(f"report tables and {len(plots)} plot(s) -> {args.out}")
    return 0


def _cmd_textprep(args):
    stream = textprep.read_words(args.words)
    stream = textprep.apply_scenario(stream, args.scenario)
    textprep.write_words(args.out, stream)
    print(f"{len(stream.words)} words -> {args.out}")
    if args.windows_out:
        spec = textprep.make_windows(len(stream.words), args.seq_len)
        textprep.write_windows(args.windows_out, spec)
        print(f"{len(spec.windows)} windows (S={args.seq_len}) -> {args.windows_out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="brainalign",
        description="Encoding-model pipeline: word features to voxel responses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--spec", required=True, help="SynthSpec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run", help="run all experiment cells")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="searchlight worker threads (default: BRAINALIGN_THREADS or 1)",
    )
    p.add_argument("--quiet", action="store_true", help="suppress per-cell progress")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="aggregate results and render plots")
    p.add_argument(
        "--in", dest="results_dir", required=True, help="results directory"
    )
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument(
        "--averaging-order",
        choices=pipeline.AVERAGING_ORDERS,
        default="voxels_folds_subjects",
        help="which mean feeds the plots",
    )
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("textprep", help="apply a token scenario to a word list")
    p.add_argument("--words", required=True, help="input words, one per line")
    p.add_argument(
        "--scenario",
        required=True,
        choices=textprep.SCENARIO_IDS,
        help="token replacement scenario",
    )
    p.add_argument("--out", required=True, help="output word file")
    p.add_argument("--seq-len", type=int, default=4, help="window length")
    p.add_argument(
        "--windows-out", default=None, help="optionally write window JSONL here"
    )
    p.set_defaults(func=_cmd_textprep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
