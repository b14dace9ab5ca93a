"""Command-line entry point: ``run``, ``report``, ``validate`` and ``synth``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from affecteval.pipeline import (
    DatasetError,
    ExperimentConfig,
    aggregate,
    emit_report,
    generate_synthetic_dataset,
    load_dataset,
    read_results,
    run_experiment,
)


def _print_summary(summary) -> None:
    print(f"{'dimension':<10} {'feature_set':<12} {'classifier':<24} {'acc':>6} {'bAcc':>6} {'ci_low':>6} {'above':>5}")
    for r in summary.rows:
        print(
            f"{r['dimension']:<10} {r['feature_set']:<12} {r['classifier']:<24} "
            f"{r['mean_accuracy']:6.3f} {r['mean_balanced_accuracy']:6.3f} {r['mean_bacc_ci_low']:6.3f} "
            f"{r['n_above_chance']:>2}/{r['n_valid']:<2}"
        )
    for d, g in summary.group.items():
        print(f"{d}: {g['n_above']}/{g['n']} above chance ({g['feature_set']}), "
              f"proportion {g['proportion']:.2f} [{g['ci_low']:.2f}, {g['ci_high']:.2f}]")
    for t in summary.ttests:
        print(f"t-test {t['dims'][0]} vs {t['dims'][1]}: t={t['t']}, p={t['p']:.3g}")


def cmd_run(args) -> int:
    config = ExperimentConfig.load(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.output_dir is not None:
        config = dataclasses.replace(config, output_dir=Path(args.output_dir))
    results = run_experiment(config, jobs=args.jobs)
    summary = aggregate(results, config.alpha)
    paths = emit_report(results, summary, config.output_dir)
    _print_summary(summary)
    print(f"wrote {len(results)} results to {paths['results']}")
    return 0


def cmd_report(args) -> int:
    results = read_results(args.results)
    summary = aggregate(results, args.alpha)
    out = Path(args.results)
    out = out if out.is_dir() else out.parent
    emit_report(results, summary, out)
    _print_summary(summary)
    return 0


def cmd_validate(args) -> int:
    ds = load_dataset(args.manifest, args.min_samples)
    m = ds.manifest
    print(f"{m.name}: {len(ds.trials)} participants, {ds.n_trials} trials, "
          f"{len(m.channel_labels)} channels @ {m.sample_rate_hz:g} Hz, {m.rating_scale_max}-point scale")
    return 0


def cmd_synth(args) -> int:
    path = generate_synthetic_dataset(args.out, args.participants, args.trials, args.snr_db, args.seed)
    print(f"wrote {path} and {path.parent / 'config.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affecteval", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="rebuild summary files from results.csv")
    p.add_argument("--results", required=True, help="results directory or results.csv path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check a dataset manifest and its signal files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--min-samples", type=int, default=258)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="write a planted-signal synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--participants", type=int, default=16)
    p.add_argument("--trials", type=int, default=60)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
