"""High-level drivers shared by the CLI and the test suite.

Each run_* function performs one subcommand's work: read inputs, call the
library, write every output file (plus a manifest), and return a summary
dict suitable for --json printing.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Sequence

from . import agreement as agreement_mod
from . import dataset as dataset_mod
from . import ingest as ingest_mod
from .errors import FormatError
from .manifest import write_manifest


def run_ingest(
    hit_path: str | Path,
    out_path: str | Path,
    column_map_path: str | Path | None = None,
    strict: bool = True,
    command: Sequence[str] | None = None,
) -> dict:
    cmap = (
        ingest_mod.ColumnMapConfig.load(column_map_path)
        if column_map_path
        else ingest_mod.ColumnMapConfig.default()
    )
    error_log: list[str] = []
    hit_count = 0
    row_count = 0
    per_source: dict[str, int] = {}
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(ingest_mod.ROWS_HEADER) + "\n")
        for hit in ingest_mod.parse_hit_file(
            hit_path, cmap, strict=strict, error_log=error_log
        ):
            hit_count += 1
            for row in ingest_mod.explode(hit):
                fh.write(ingest_mod.format_row(row) + "\n")
                row_count += 1
                per_source[row.source] = per_source.get(row.source, 0) + 1
    inputs = [hit_path] + ([column_map_path] if column_map_path else [])
    write_manifest(
        str(out_path) + ".manifest.json",
        list(command or []),
        inputs,
        extra={"hits": hit_count, "rows": row_count},
    )
    return {
        "hits": hit_count,
        "rows": row_count,
        "rows_per_source": dict(sorted(per_source.items())),
        "skipped_lines": len(error_log),
        "errors": error_log,
        "output": str(out_path),
    }


def run_build_dataset(
    rows_path: str | Path,
    out_dir: str | Path,
    seed: int,
    assignment_path: str | Path | None = None,
    key_mode: str = "normalized",
    jobs: int = 1,
    command: Sequence[str] | None = None,
) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = list(ingest_mod.read_rows(rows_path))
    if not rows:
        raise FormatError("%s contains no annotation rows" % rows_path)

    groups = dataset_mod.group_comments(rows, key_mode=key_mode, jobs=jobs)
    other_key = "raw" if key_mode == "normalized" else "normalized"
    other_key_count = dataset_mod.count_distinct_keys(rows, other_key)
    distinct_keys = {key_mode: len(groups), other_key: other_key_count}

    kept, discarded = dataset_mod.discard_junk(groups)
    for group in kept:
        group.aldi = dataset_mod.aggregate(group)
    categories = {id(g): dataset_mod.categorize_discard(g) for g in discarded}

    assignment = (
        dataset_mod.load_assignment(assignment_path) if assignment_path else None
    )
    plan = dataset_mod.SplitPlan(seed=seed)
    dataset_mod.make_splits(kept, plan, assignment)

    stats = dataset_mod.corpus_stats(kept, discarded, categories)
    stats["distinct_keys"] = distinct_keys
    stats["key_mode"] = key_mode
    stats["seed"] = seed

    _write_lines(out_dir / "dataset.tsv", dataset_mod.dataset_lines(kept))
    _write_lines(
        out_dir / "discarded.tsv", dataset_mod.discarded_lines(discarded, categories)
    )
    _write_lines(out_dir / "split_assignment.tsv", dataset_mod.assignment_lines(kept))
    with open(out_dir / "stats.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(stats, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out_dir / "stats.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dataset_mod.render_stats_text(stats))
    inputs = [rows_path] + ([assignment_path] if assignment_path else [])
    write_manifest(
        out_dir / "manifest.json",
        list(command or []),
        inputs,
        seed=seed,
        extra={"jobs_requested": jobs, "key_mode": key_mode},
    )
    return {
        "groups": stats["groups"],
        "kept": len(kept),
        "discarded": len(discarded),
        "output_dir": str(out_dir),
    }


def _write_lines(path: Path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def run_agreement(rows_path: str | Path, key_mode: str = "normalized") -> dict:
    rows = list(ingest_mod.read_rows(rows_path))
    groups = dataset_mod.group_comments(rows, key_mode=key_mode)
    labels, values = agreement_mod.level_agreement_items(groups)
    if not labels:
        raise FormatError("no groups with exactly 3 usable annotations")
    kappa = agreement_mod.fleiss_kappa(labels)
    alpha = agreement_mod.krippendorff_alpha_interval(values)
    return {
        "items": len(labels),
        "ratings": 3 * len(labels),
        "groups_total": len(groups),
        "fleiss_kappa": kappa,
        "krippendorff_alpha_interval": alpha,
    }


def read_score_file(path: str | Path) -> dict[int, float]:
    """Predictions: 'id TAB score' per line (bare scores get line-number ids)."""
    scores: dict[int, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            try:
                if len(parts) == 1:
                    scores[lineno] = float(parts[0])
                else:
                    scores[int(parts[0])] = float(parts[-1])
            except ValueError:
                raise FormatError(
                    "%s: line %d is not 'id<TAB>score'" % (path, lineno)
                ) from None
    if not scores:
        raise FormatError("%s contains no scores" % path)
    return scores


def read_dataset_file(path: str | Path) -> list[dict]:
    """Rows of a built dataset file, keyed by header names, id = ordinal."""
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if "text" not in header or "aldi" not in header:
            raise FormatError("%s: not a dataset file" % path)
        for ordinal, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(header):
                raise FormatError(
                    "%s: row %d has %d columns, expected %d"
                    % (path, ordinal, len(cells), len(header))
                )
            record = dict(zip(header, cells))
            record["id"] = ordinal
            records.append(record)
    return records
