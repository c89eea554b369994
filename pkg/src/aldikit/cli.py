"""Command-line entry point: one executable, one subcommand per stage.

Exit codes: 0 success, 1 I/O failure, 2 format/validation failure,
3 external-scorer protocol failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from . import FORMAT_VERSIONS, __version__
from . import dataset as dataset_mod
from . import estimators as est_mod
from . import evaluation as eval_mod
from . import pipeline
from . import speech as speech_mod
from . import svgplot
from .errors import AldiError, FormatError, ProtocolError
from .manifest import write_manifest

EXIT_OK = 0
EXIT_IO = 1
EXIT_FORMAT = 2
EXIT_PROTOCOL = 3


def _version_string() -> str:
    formats = ", ".join("%s=%s" % kv for kv in sorted(FORMAT_VERSIONS.items()))
    return "aldikit %s (formats: %s)" % (__version__, formats)


def _score_formatter(full_precision: bool):
    if full_precision:
        return lambda v: repr(float(v))
    return lambda v: dataset_mod.format_score(v)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2))


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--estimator",
        required=True,
        choices=("lexicon", "cmi", "binary-di", "external"),
        help="which score producer to use",
    )
    parser.add_argument("--lexicon", help="lexicon file (estimator=lexicon)")
    parser.add_argument(
        "--tags", help="token-tag file, blank-line separated (estimator=cmi)"
    )
    parser.add_argument(
        "--labels", help="sentence-DI label file, one label per line (binary-di)"
    )
    parser.add_argument(
        "--scorer-cmd", help="external scorer command line (estimator=external)"
    )
    parser.add_argument(
        "--batch-size", type=int, default=None, help="external scorer batch size"
    )


def _make_estimator(args, sentence_count: int | None = None):
    if args.estimator == "lexicon":
        if not args.lexicon:
            raise FormatError("--estimator lexicon requires --lexicon")
        return est_mod.LexiconEstimator(est_mod.load_lexicon(args.lexicon))
    if args.estimator == "cmi":
        if not args.tags:
            raise FormatError("--estimator cmi requires --tags")
        sequences = est_mod.read_token_tag_file(args.tags)
        return est_mod.CmiEstimator([[tag for _, tag in seq] for seq in sequences])
    if args.estimator == "binary-di":
        if not args.labels:
            raise FormatError("--estimator binary-di requires --labels")
        return est_mod.BinaryDiEstimator(est_mod.read_label_file(args.labels))
    if not args.scorer_cmd:
        raise FormatError("--estimator external requires --scorer-cmd")
    config = est_mod.ExternalScorerConfig(
        command=tuple(shlex.split(args.scorer_cmd)), batch_size=args.batch_size
    )
    return est_mod.ExternalEstimator(config)


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_ingest(args) -> int:
    summary = pipeline.run_ingest(
        args.hit_file,
        args.output,
        column_map_path=args.column_map,
        strict=not args.lenient,
        command=sys.argv[1:],
    )
    if args.json:
        _print_json(summary)
    else:
        print(
            "ingested %d HITs -> %d rows (%s)"
            % (summary["hits"], summary["rows"], summary["output"])
        )
        for source, count in summary["rows_per_source"].items():
            print("  %-9s %d" % (source, count))
        if summary["skipped_lines"]:
            print("  skipped %d malformed line(s)" % summary["skipped_lines"])
    return EXIT_OK


def _cmd_build_dataset(args) -> int:
    summary = pipeline.run_build_dataset(
        args.rows_file,
        args.output,
        seed=args.seed,
        assignment_path=args.splits,
        key_mode=args.key,
        jobs=args.jobs,
        command=sys.argv[1:],
    )
    if args.json:
        _print_json(summary)
    else:
        print(
            "built dataset: %d kept, %d discarded -> %s"
            % (summary["kept"], summary["discarded"], summary["output_dir"])
        )
    return EXIT_OK


def _cmd_agreement(args) -> int:
    report = pipeline.run_agreement(args.rows_file)
    if args.json:
        _print_json(report)
    else:
        print("items with 3 usable annotations: %d" % report["items"])
        print("ratings:                         %d" % report["ratings"])
        print("Fleiss kappa:                    %.6f" % report["fleiss_kappa"])
        print(
            "Krippendorff alpha (interval):   %.6f"
            % report["krippendorff_alpha_interval"]
        )
    return EXIT_OK


def _cmd_build_lexicon(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        lexicon, counts = est_mod.build_lexicon(
            fh, min_occurrences=args.min_count, source_name=str(args.corpus)
        )
    est_mod.save_lexicon(lexicon, args.output, counts if args.counts else None)
    write_manifest(
        str(args.output) + ".manifest.json",
        sys.argv[1:],
        [args.corpus],
        extra={"tokens": len(lexicon), "min_count": args.min_count},
    )
    payload = {
        "tokens": len(lexicon),
        "distinct_tokens_seen": len(counts),
        "min_count": args.min_count,
        "output": str(args.output),
    }
    if args.json:
        _print_json(payload)
    else:
        print(
            "lexicon: kept %d of %d distinct tokens (min_count=%d) -> %s"
            % (len(lexicon), len(counts), args.min_count, args.output)
        )
    return EXIT_OK


def _read_sentences(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def _cmd_score(args) -> int:
    if args.sentences:
        sentences = _read_sentences(args.sentences)
        source_path = args.sentences
    elif args.from_dataset:
        records = pipeline.read_dataset_file(args.from_dataset)
        sentences = [r["text"] for r in records]
        source_path = args.from_dataset
    elif args.estimator == "cmi" and args.tags:
        sequences = est_mod.read_token_tag_file(args.tags)
        sentences = [" ".join(tok for tok, _ in seq) for seq in sequences]
        source_path = args.tags
    else:
        raise FormatError("score needs --sentences or --from-dataset")
    estimator = _make_estimator(args)
    scores = estimator.score_many(sentences)
    fmt = _score_formatter(args.full_precision)
    lines = ["%d\t%s" % (i, fmt(s)) for i, s in enumerate(scores, start=1)]
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        write_manifest(
            str(args.output) + ".manifest.json",
            sys.argv[1:],
            [source_path],
            extra={"estimator": estimator.estimator_id, "scores": len(scores)},
        )
        print("scored %d sentences -> %s" % (len(scores), args.output))
    else:
        for line in lines:
            print(line)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    records = pipeline.read_dataset_file(args.gold)
    predictions = pipeline.read_score_file(args.pred)
    selected = [
        r
        for r in records
        if (args.split is None or r.get("split") == args.split) and r.get("aldi")
    ]
    if not selected:
        raise FormatError("no gold rows selected")
    pairs = []
    for record in selected:
        if record["id"] not in predictions:
            raise FormatError("no prediction for dataset row %d" % record["id"])
        pairs.append(
            eval_mod.ScoredPair(
                gold=float(record["aldi"]),
                predicted=predictions[record["id"]],
                subset=record["kind"],
            )
        )
    if args.split is None and len(predictions) != len(selected):
        raise FormatError(
            "%d predictions for %d gold rows" % (len(predictions), len(selected))
        )
    report = eval_mod.rmse_report(pairs)
    if args.json:
        _print_json(report)
    else:
        print("%-8s %8s  %s" % ("subset", "n", "rmse"))
        for name in ("control", "comment", "all"):
            cell = report[name]
            value = "-" if cell["rmse"] is None else "%.6f" % cell["rmse"]
            print("%-8s %8d  %s" % (name, cell["n"], value))
    return EXIT_OK


def _read_group_scores(path: str) -> list[float]:
    return [v for _, v in sorted(pipeline.read_score_file(path).items())]


def _cmd_dprime(args) -> int:
    group_a = _read_group_scores(args.a)
    group_b = _read_group_scores(args.b)
    value = eval_mod.d_prime(group_a, group_b, sample_variance=not args.population)
    if args.json:
        _print_json(
            {
                "d_prime": value,
                "n_a": len(group_a),
                "n_b": len(group_b),
                "variance": "population" if args.population else "sample",
            }
        )
    else:
        print("%.6f" % value)
    return EXIT_OK


def _cmd_contrastive(args) -> int:
    pairs = eval_mod.read_pairs_file(args.pairs_file)
    estimators = []
    if args.lexicon:
        estimators.append(est_mod.LexiconEstimator(est_mod.load_lexicon(args.lexicon)))
    if args.di_labels:
        estimators.append(
            est_mod.BinaryDiEstimator(est_mod.read_label_file(args.di_labels))
        )
    if args.tags:
        sequences = est_mod.read_token_tag_file(args.tags)
        estimators.append(
            est_mod.CmiEstimator([[tag for _, tag in seq] for seq in sequences])
        )
    if args.scorer_cmd:
        estimators.append(
            est_mod.ExternalEstimator(
                est_mod.ExternalScorerConfig(
                    command=tuple(shlex.split(args.scorer_cmd)),
                    batch_size=args.batch_size,
                )
            )
        )
    if not estimators:
        raise FormatError(
            "contrastive needs at least one of --lexicon/--di-labels/--tags/--scorer-cmd"
        )
    rows = eval_mod.contrastive_matrix(pairs, estimators)
    fmt = _score_formatter(args.full_precision)
    table = eval_mod.render_matrix_tsv(rows, fmt)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table)
        write_manifest(
            str(args.output) + ".manifest.json",
            sys.argv[1:],
            [args.pairs_file],
            extra={"rows": len(rows)},
        )
        print("wrote %d matrix rows -> %s" % (len(rows), args.output))
    else:
        sys.stdout.write(table)
    if args.json:
        _print_json(
            {
                "rows": [
                    {
                        "feature_id": row.feature_id,
                        "word_order": row.word_order,
                        "scores": row.scores,
                        "flagged": sorted(row.flagged),
                    }
                    for row in rows
                ]
            }
        )
    return EXIT_OK


def _cmd_speech(args) -> int:
    sentences = speech_mod.segment_html_file(args.html_file, args.mode)
    estimator = _make_estimator(args)
    di_labels = est_mod.read_label_file(args.di_labels) if args.di_labels else None
    document_id = args.doc_id or Path(args.html_file).stem
    series = speech_mod.score_series(document_id, sentences, estimator, di_labels)
    fmt = _score_formatter(args.full_precision)
    outputs = []
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            speech_mod.write_series_csv(series, fh, score_fmt=fmt)
        outputs.append(args.output)
    if args.plot:
        svgplot.emit_plot(series, args.plot)
        outputs.append(args.plot)
    for out in outputs:
        write_manifest(
            str(out) + ".manifest.json",
            sys.argv[1:],
            [args.html_file],
            extra={"segments": len(series.points), "mode": args.mode},
        )
    if args.json:
        _print_json(
            {
                "document_id": series.document_id,
                "estimator": series.estimator_id,
                "segments": len(series.points),
                "outputs": [str(o) for o in outputs],
            }
        )
    else:
        print(
            "%s: %d segments scored with %s"
            % (series.document_id, len(series.points), series.estimator_id)
        )
        for out in outputs:
            print("  wrote %s" % out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aldikit",
        description="Build, score, and evaluate Arabic level-of-dialectness data.",
    )
    parser.add_argument("--version", action="version", version=_version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a HIT export into annotation rows")
    p.add_argument("hit_file")
    p.add_argument("--column-map", help="column map JSON (default: shipped map)")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lenient", action="store_true", help="skip malformed lines")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("build-dataset", help="group, clean, aggregate, split")
    p.add_argument("rows_file")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--splits", help="article-to-split assignment file to replay")
    p.add_argument("--key", choices=("normalized", "raw"), default="normalized")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("agreement", help="inter-annotator agreement statistics")
    p.add_argument("rows_file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_agreement)

    p = sub.add_parser("build-lexicon", help="frequency-thresholded token set")
    p.add_argument("corpus")
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--counts", action="store_true", help="store counts in the file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_build_lexicon)

    p = sub.add_parser("score", help="score sentences with an estimator")
    _add_estimator_flags(p)
    p.add_argument("--sentences", help="text file, one sentence per line")
    p.add_argument("--from-dataset", help="take texts from a built dataset file")
    p.add_argument("-o", "--output")
    p.add_argument("--full-precision", action="store_true")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("evaluate", help="RMSE of predictions against gold")
    p.add_argument("--gold", required=True, help="dataset file")
    p.add_argument("--pred", required=True, help="id TAB score predictions")
    p.add_argument("--split", choices=("train", "dev", "test"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("dprime", help="discrimination between two score files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--population", action="store_true", help="divisor n, not n-1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_dprime)

    p = sub.add_parser("contrastive", help="feature x estimator score matrix")
    p.add_argument("pairs_file")
    p.add_argument("--lexicon")
    p.add_argument("--di-labels")
    p.add_argument("--tags")
    p.add_argument("--scorer-cmd")
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("-o", "--output")
    p.add_argument("--full-precision", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_contrastive)

    p = sub.add_parser("speech", help="segment a saved HTML transcript and score it")
    p.add_argument("html_file")
    p.add_argument("--mode", required=True, choices=("br", "p"))
    _add_estimator_flags(p)
    p.add_argument("--di-labels-file", dest="di_labels", help="DI label per segment")
    p.add_argument("--doc-id")
    p.add_argument("-o", "--output", help="series CSV path")
    p.add_argument("--plot", help="SVG scatter path")
    p.add_argument("--full-precision", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_speech)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProtocolError as exc:
        print("protocol error: %s" % exc, file=sys.stderr)
        return EXIT_PROTOCOL
    except (FormatError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FORMAT
    except AldiError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
