"""Command-line interface.

Subcommands::

    fairlab gen --spec spec.json --out data.csv
    fairlab metrics --in data.csv
    fairlab repair --in data.csv --config '{"method":"dir","lambda":0.5}' --out out.csv
    fairlab hist --in data.csv --bins 50 --range 3.0,8.0
    fairlab reproduce --seed 42 --out report_dir
    fairlab sweep --config experiment.json --out report_dir

Every command exits 0 on success and nonzero with a diagnostic on stderr
otherwise; all randomness is controlled by explicit seeds.
"""

from __future__ import annotations

import argparse
import json
import sys

from .datasets import generate, read_csv, read_spec, resample_by_weight, write_csv
from .errors import FairlabError
from .harness import ExperimentConfig, reproduce, run_tradeoff_sweep
from .metrics import dataset_report, group_histograms
from .repairers import RepairConfig


def _load_json_arg(text: str) -> dict:
    """Accept either inline JSON or a path to a JSON file."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return json.loads(stripped)
    with open(text, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _cmd_gen(args) -> int:
    data = generate(read_spec(args.spec))
    write_csv(data, args.out)
    return 0


def _cmd_metrics(args) -> int:
    report = dataset_report(read_csv(args.in_path))
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_repair(args) -> int:
    from .repairers import apply_repair

    config = RepairConfig.from_dict(_load_json_arg(args.config))
    repaired = apply_repair(read_csv(args.in_path), config)
    if args.resample_seed is not None and config.reweights:
        repaired = resample_by_weight(repaired, args.resample_seed)
    write_csv(repaired, args.out)
    return 0


def _cmd_hist(args) -> int:
    try:
        lo_txt, hi_txt = args.range.split(",")
        value_range = (float(lo_txt), float(hi_txt))
    except ValueError:
        raise ValueError(f"--range expects 'lo,hi', got {args.range!r}") from None
    hists = group_histograms(read_csv(args.in_path), args.bins, value_range)
    print(json.dumps([h.as_dict() for h in hists], indent=2, sort_keys=True))
    return 0


def _cmd_reproduce(args) -> int:
    reproduce(args.seed, args.out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_dict(_load_json_arg(args.config))
    run_tradeoff_sweep(cfg, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairlab",
        description="Synthetic group-disparity data, fairness repairers, and reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a dataset CSV from a spec JSON")
    p.add_argument("--spec", required=True, help="dataset spec JSON file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("metrics", help="print dataset metrics as JSON")
    p.add_argument("--in", dest="in_path", required=True, help="input CSV path")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("repair", help="apply a repair config to a dataset CSV")
    p.add_argument("--in", dest="in_path", required=True, help="input CSV path")
    p.add_argument("--config", required=True, help="repair config JSON (inline or file)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument(
        "--resample-seed",
        type=int,
        default=None,
        help="materialize weight-based repairs by seeded resampling",
    )
    p.set_defaults(func=_cmd_repair)

    p = sub.add_parser("hist", help="print per-group histograms as JSON")
    p.add_argument("--in", dest="in_path", required=True, help="input CSV path")
    p.add_argument("--bins", type=int, required=True, help="number of bins")
    p.add_argument("--range", required=True, help="bin range as 'lo,hi'")
    p.set_defaults(func=_cmd_hist)

    p = sub.add_parser("reproduce", help="run the full benchmark report")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("sweep", help="run a fairness-accuracy trade-off sweep")
    p.add_argument("--config", required=True, help="experiment config JSON (inline or file)")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FairlabError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"fairlab: error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
