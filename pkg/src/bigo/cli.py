"""Command-line interface.

Exit codes are stable per error category so shell pipelines can branch on
them: 2 I/O, 3 dataset format, 4 back-translation requested without an
augmenter, 5 configuration, 6 runtime failure inside a run.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .augment import (
    AugKind,
    AugmenterUnavailable,
    AugStrategy,
    Sampling,
    augment_dataset,
    mock_backtranslate,
)
from .classifier import BuiltinModel, Hyperparams
from .core import (
    ALL_CLASSES,
    ComplexityClass,
    DataError,
    InsufficientClassCount,
    dump_jsonl,
    load_jsonl,
)
from .corpus import generate_corpus
from .engine import ConfigError, ExperimentConfig, run_experiment
from .symbolic import AnalysisUnavailable, analyze

EXIT_IO = 2
EXIT_DATA = 3
EXIT_NO_AUGMENTER = 4
EXIT_CONFIG = 5
EXIT_RUNTIME = 6


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str) -> "_CliError":
    return _CliError(code, message)


def _check_overwrite(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise _fail(EXIT_IO, f"{path} exists; pass --force to overwrite")


def _load(path: str, class_set=ALL_CLASSES):
    try:
        return load_jsonl(path, class_set)
    except OSError as exc:
        raise _fail(EXIT_IO, str(exc))
    except DataError as exc:
        raise _fail(EXIT_DATA, str(exc))


# ---------------------------------------------------------------------------
# subcommands

def _cmd_analyze(args) -> int:
    dataset = _load(args.dataset)
    records = []
    predictions = {}
    for snippet in dataset.snippets:
        try:
            cls, trace = analyze(snippet)
            records.append(
                {"id": snippet.id, "class": cls.serialized, "trace": list(trace)}
            )
            predictions[snippet.id] = cls
        except AnalysisUnavailable as exc:
            records.append({"id": snippet.id, "error": str(exc)})

    out = sys.stdout
    if args.out:
        _check_overwrite(Path(args.out), args.force)
        out = open(args.out, "w")
    try:
        if args.format == "json":
            for rec in records:
                out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            writer = csv.writer(out)
            writer.writerow(["id", "class", "error"])
            for rec in records:
                writer.writerow(
                    [rec["id"], rec.get("class", ""), rec.get("error", "")]
                )
    finally:
        if args.out:
            out.close()

    if args.gold:
        from .core import compute_metrics

        gold = _load(args.gold)
        missing = [
            ex.snippet.id for ex in gold.labeled if ex.snippet.id not in predictions
        ]
        if missing:
            raise _fail(
                EXIT_DATA, f"no analysis result for gold ids: {missing[:5]}"
            )
        metrics = compute_metrics(predictions, gold.labeled, gold.class_set)
        print(json.dumps(metrics.to_dict(), sort_keys=True), file=sys.stderr)
    return 0


def _cmd_augment(args) -> int:
    dataset = _load(args.dataset)
    strategy = AugStrategy(AugKind(args.strategy), Sampling(args.sampling))
    bt = None
    if strategy.kind in (AugKind.BT, AugKind.BT_PLUS_LC):
        if args.augmenter == "mock":
            bt = mock_backtranslate
        elif args.augmenter:
            from .backends import ExternalAugmenter

            bt = ExternalAugmenter(args.augmenter.split())
        else:
            raise _fail(
                EXIT_NO_AUGMENTER,
                "back-translation requested but no --augmenter given",
            )
    labeled = list(dataset.labeled)
    try:
        augmented = augment_dataset(labeled, strategy, bt)
    except AugmenterUnavailable as exc:
        raise _fail(EXIT_NO_AUGMENTER, str(exc))
    finally:
        if hasattr(bt, "close"):
            bt.close()

    out_path = Path(args.out)
    prov_path = out_path.with_suffix(out_path.suffix + ".provenance.json")
    _check_overwrite(out_path, args.force)
    _check_overwrite(prov_path, args.force)
    dump_jsonl(labeled + [a.to_labeled() for a in augmented], out_path)
    prov_path.write_text(
        json.dumps(
            [
                {"id": a.snippet.id, "original": a.original, "method": a.method.value}
                for a in augmented
            ],
            sort_keys=True,
            indent=2,
        )
    )
    print(f"{len(labeled)} originals + {len(augmented)} augmented -> {out_path}")
    return 0


def _cmd_train(args) -> int:
    dataset = _load(args.dataset)
    if not dataset.labeled:
        raise _fail(EXIT_DATA, f"{args.dataset} has no labeled examples")
    model = BuiltinModel(dataset.class_set, Hyperparams())
    model.fit(list(dataset.labeled), seed=args.seed)
    out = Path(args.out)
    _check_overwrite(out, args.force)
    model.save(out)
    print(f"trained on {len(dataset.labeled)} examples -> {out}")
    return 0


def _cmd_predict(args) -> int:
    try:
        model = BuiltinModel.load(args.model)
    except OSError as exc:
        raise _fail(EXIT_IO, str(exc))
    except (ValueError, KeyError) as exc:
        raise _fail(EXIT_DATA, f"{args.model}: not a saved model: {exc}")
    dataset = _load(args.dataset, model.class_set)
    out = sys.stdout
    if args.out:
        _check_overwrite(Path(args.out), args.force)
        out = open(args.out, "w")
    try:
        for snippet, dist in zip(
            dataset.snippets, model.predict_many(list(dataset.snippets))
        ):
            rec = {
                "id": snippet.id,
                "class": dist.argmax.serialized,
                "probs": {c.serialized: p for c, p in dist.probs.items()},
            }
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_experiment(args) -> int:
    try:
        config = ExperimentConfig.from_file(args.config)
    except ConfigError as exc:
        raise _fail(EXIT_CONFIG, str(exc))
    if args.out_dir:
        config.out_dir = args.out_dir
    try:
        report = run_experiment(config)
    except (InsufficientClassCount, ConfigError) as exc:
        raise _fail(EXIT_CONFIG, str(exc))
    except AugmenterUnavailable as exc:
        raise _fail(EXIT_NO_AUGMENTER, str(exc))
    except OSError as exc:
        raise _fail(EXIT_IO, str(exc))
    except DataError as exc:
        raise _fail(EXIT_DATA, str(exc))
    except Exception as exc:  # anything unexpected inside a run
        raise _fail(EXIT_RUNTIME, f"{type(exc).__name__}: {exc}")
    if config.out_dir:
        out = Path(config.out_dir)
        if (out / "report.json").exists() and not args.force:
            raise _fail(EXIT_IO, f"{out / 'report.json'} exists; pass --force")
        report.write(out)
    print(report.table_row())
    return 0


def _cmd_gen_corpus(args) -> int:
    try:
        class_set = tuple(ComplexityClass.from_name(n) for n in args.classes.split(","))
    except ValueError as exc:
        raise _fail(EXIT_CONFIG, str(exc))
    dataset = generate_corpus(args.per_class, args.seed, class_set, prefix=args.prefix)
    out = Path(args.out)
    _check_overwrite(out, args.force)
    dump_jsonl(dataset.labeled, out)
    print(f"{len(dataset)} snippets -> {out}")
    return 0


def _cmd_report(args) -> int:
    try:
        raw = json.loads(Path(args.report).read_text())
    except OSError as exc:
        raise _fail(EXIT_IO, str(exc))
    except json.JSONDecodeError as exc:
        raise _fail(EXIT_DATA, f"{args.report}: {exc}")
    try:
        agg = raw["aggregate"]
        rows = [
            (r["seed"], r["selected_epoch"], r["test"]["accuracy"], r["test"]["macro_f1"])
            for r in raw["per_seed"]
        ]
    except (KeyError, TypeError) as exc:
        raise _fail(EXIT_DATA, f"{args.report}: missing report field {exc}")
    if args.format == "json":
        print(json.dumps(agg, sort_keys=True))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["seed", "selected_epoch", "accuracy", "macro_f1"])
        for row in rows:
            writer.writerow(row)
        writer.writerow(["mean±std", "", agg["table_row"], ""])
    return 0


# ---------------------------------------------------------------------------
# argument wiring

def build_parser() -> argparse.ArgumentParser:
    # global flags live on a parent parser so they are accepted both before
    # and after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="global random seed"
    )
    common.add_argument(
        "--force",
        action="store_true",
        default=argparse.SUPPRESS,
        help="overwrite existing output files",
    )
    common.add_argument(
        "--jobs",
        type=int,
        default=argparse.SUPPRESS,
        help="parallel seeds (reserved; runs are sequential)",
    )
    common.add_argument(
        "--format", choices=["json", "csv"], default=argparse.SUPPRESS
    )

    parser = argparse.ArgumentParser(
        prog="bigo",
        description="Few-shot time-complexity classification toolkit",
        parents=[common],
    )
    parser.set_defaults(seed=0, force=False, jobs=1, format="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "analyze", help="symbolic analysis of a snippet dataset", parents=[common]
    )
    p.add_argument("dataset", help="JSONL file of snippets")
    p.add_argument("--gold", help="labeled JSONL to score the analysis against")
    p.add_argument("--out", help="write records here instead of stdout")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("augment", help="deterministic dataset augmentation", parents=[common])
    p.add_argument("dataset")
    p.add_argument("--strategy", choices=["bt", "lc", "bt+lc"], required=True)
    p.add_argument("--sampling", choices=["natural", "artificial"], default="natural")
    p.add_argument(
        "--augmenter",
        help="'mock' or a back-translation subprocess command line",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("train", help="fit the built-in classifier and save it", parents=[common])
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="classify snippets with a saved model", parents=[common])
    p.add_argument("dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("experiment", help="run a full multi-seed experiment", parents=[common])
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--out-dir", help="override the config's output directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("gen-corpus", help="generate the bundled synthetic corpus", parents=[common])
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument(
        "--classes",
        default=",".join(c.serialized for c in ALL_CLASSES),
        help="comma-separated class names",
    )
    p.add_argument("--prefix", default="syn")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("report", help="summarize a written report.json", parents=[common])
    p.add_argument("report")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
