"""Command-line entry point.

Four subcommands: ``run`` (shuffle evaluation), ``exp1`` (shuffled-class
augmentation), ``exp2`` (generic-class augmentation), and ``protocol-check``
(adapter conformance). Each run writes a canonical JSON report, a box-plot
CSV, and a summary CSV under ``<out>/<experiment>/`` and prints the summary
table to stdout.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .adapter import (
    DEFAULT_BATCH_SIZE,
    AdapterError,
    ExternalAdapterModel,
    run_protocol_check,
)
from .augment import run_experiment1, run_experiment2
from .corpus import DatasetError, load_dataset, load_generic_corpus
from .evaluate import run_shuftext
from .models import make_builtin
from .report import (
    ReportError,
    build_manifest,
    emit_boxplot_data,
    emit_json,
    emit_table_csv,
    summary_rows,
)


def _u64(raw: str) -> int:
    value = int(raw)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train", required=True, help="path to the train split")
    parser.add_argument("--test", required=True, help="path to the test split")
    parser.add_argument(
        "--format",
        choices=["auto", "tsv", "jsonl"],
        default="auto",
        help="input format (default: infer from file suffix)",
    )
    parser.add_argument("--dataset-name", default=None, help="name echoed in reports")


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--model",
        choices=["builtin-nb", "builtin-ngram-lr", "external"],
        default="builtin-nb",
    )
    parser.add_argument("--adapter", default=None, help="adapter command line (external model)")
    parser.add_argument("--model-seed", type=int, default=0, help="builtin-ngram-lr config seed")
    parser.add_argument("--epochs", type=int, default=20, help="builtin-ngram-lr SGD epochs")
    parser.add_argument(
        "--learning-rate", type=float, default=0.1, help="builtin-ngram-lr SGD step size"
    )
    parser.add_argument(
        "--adapter-timeout",
        type=float,
        default=None,
        help="seconds per adapter request (default 120; env SHUFTEXT_ADAPTER_TIMEOUT_SECS)",
    )
    parser.add_argument(
        "--batch-size", type=int, default=DEFAULT_BATCH_SIZE, help="adapter predict batch size"
    )


def _add_run_args(parser: argparse.ArgumentParser) -> None:
    _add_dataset_args(parser)
    _add_model_args(parser)
    parser.add_argument("--seed", type=_u64, default=0, help="shuffle seed (u64, default 0)")
    parser.add_argument("--out", required=True, help="output directory for report artifacts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shuftext",
        description="Quantify how much a text classifier relies on keywords vs word order.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="shuffle correctly classified test sentences and re-score")
    _add_run_args(run)

    exp1 = sub.add_parser("exp1", help="shuffled-class training augmentation experiment")
    _add_run_args(exp1)

    exp2 = sub.add_parser("exp2", help="generic-class training augmentation experiment")
    _add_run_args(exp2)
    exp2.add_argument(
        "--generic-corpus", required=True, help="path to the out-of-domain corpus"
    )
    exp2.add_argument(
        "--generic-format",
        choices=["auto", "tsv", "jsonl"],
        default="auto",
        help="generic corpus format (default: infer from suffix)",
    )

    check = sub.add_parser("protocol-check", help="validate an adapter against the wire protocol")
    check.add_argument("--adapter", required=True, help="adapter command line")
    check.add_argument("--adapter-timeout", type=float, default=None)
    return parser


def _build_model(args: argparse.Namespace):
    if args.model == "builtin-nb":
        return make_builtin("builtin-nb")
    if args.model == "builtin-ngram-lr":
        return make_builtin(
            "builtin-ngram-lr",
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            seed=args.model_seed,
        )
    if not args.adapter:
        raise AdapterError("--model external requires --adapter '<command line>'")
    return ExternalAdapterModel(
        args.adapter, timeout=args.adapter_timeout, batch_size=args.batch_size
    )


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", name) or "dataset"


def _print_summary(rows: list[list[str]]) -> None:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def _run_pipeline(args: argparse.Namespace, experiment: str) -> int:
    dataset = load_dataset(args.train, args.test, args.format, name=args.dataset_name)
    input_paths = {"train": args.train, "test": args.test}
    model = _build_model(args)
    try:
        if experiment == "shuftext":
            report = run_shuftext(model, dataset, args.seed)
        elif experiment == "exp1":
            report = run_experiment1(model, dataset, args.seed)
        else:
            corpus = load_generic_corpus(args.generic_corpus, args.generic_format)
            input_paths["generic"] = args.generic_corpus
            report = run_experiment2(model, dataset, corpus, args.seed)
    finally:
        if hasattr(model, "close"):
            model.close()
    report.manifest = build_manifest(report, input_paths)

    outdir = Path(args.out) / experiment
    outdir.mkdir(parents=True, exist_ok=True)
    base = f"{model.kind}_{_safe_name(dataset.name)}"
    emit_json(report, outdir / f"{base}.report.json")
    emit_boxplot_data(report, outdir / f"{base}.boxplot.csv")
    emit_table_csv([report], experiment, outdir / "summary.csv")

    _print_summary(summary_rows([report], experiment))
    print(f"wrote {outdir}/{base}.report.json")
    return 0


def _run_protocol_check(args: argparse.Namespace) -> int:
    results = run_protocol_check(args.adapter, timeout=args.adapter_timeout)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name}: {result.detail}")
    if all(r.passed for r in results):
        print("adapter conforms to the wire protocol")
        return 0
    print("adapter does NOT conform to the wire protocol", file=sys.stderr)
    return 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        if command == "protocol-check":
            return _run_protocol_check(args)
        experiment = {"run": "shuftext", "exp1": "exp1", "exp2": "exp2"}[command]
        return _run_pipeline(args, experiment)
    except DatasetError as exc:
        print(f"shuftext: dataset error: {exc}", file=sys.stderr)
        return 2
    except AdapterError as exc:
        print(f"shuftext: adapter error: {exc}", file=sys.stderr)
        return 3
    except ReportError as exc:
        print(f"shuftext: report error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"shuftext: error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
