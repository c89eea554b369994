"""Build the AOC-ALDi dataset from annotation rows.

Pipeline stages, in order:

1. group identical sentences on the same article (identity key uses
   normalized text by default, raw text behind a flag),
2. discard junk groups where at least 2/3 of the level annotations are
   Missing or NotArabic, and classify what got discarded,
3. aggregate the ordinal level labels (MSA=0, Little=1/3, Mixed=2/3, Most=1)
   into a single dialectness score per group: the mean of the usable labels,
4. assign article-exclusive train/dev/test splits (80/10/10 by comment
   count, per source, seeded shuffle) or replay a released assignment file.

Scores are exact rationals internally and serialize at 6 decimal places
(round half even). All output files are sorted so byte output is
independent of worker count.
"""

from __future__ import annotations

import random
import re
import zlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from . import textnorm
from .errors import AldiError, FormatError
from .ingest import AnnotationRow, LEVELS, ORDINAL_LEVELS

LEVEL_VALUES = {
    "MSA": Fraction(0),
    "Little": Fraction(1, 3),
    "Mixed": Fraction(2, 3),
    "Most": Fraction(1),
}

UNUSABLE_LEVELS = ("NotArabic", "Missing")

DISCARD_CATEGORIES = (
    "UrlOrEmail",
    "HtmlArtifacts",
    "Symbols",
    "Arabizi",
    "English",
    "Other",
)

DATASET_HEADER = (
    "source",
    "article_id",
    "kind",
    "text",
    "level_1",
    "level_2",
    "level_3",
    "dialect_1",
    "dialect_2",
    "dialect_3",
    "aldi",
    "split",
)

DISCARDED_HEADER = ("source", "article_id", "kind", "category", "levels", "text")

ALDI_BINS = ("[0.00,0.25)", "[0.25,0.50)", "[0.50,0.75)", "[0.75,1.00]")


class GroupAnnotation(NamedTuple):
    level: str
    dialect: str | None
    worker_id: str


@dataclass
class CommentGroup:
    source: str
    article_id: str
    canonical_text: str
    raw_text: str
    kind: str
    annotations: list[GroupAnnotation]
    aldi: Fraction | None = None
    split: str | None = None

    @property
    def usable_levels(self) -> list[str]:
        return [a.level for a in self.annotations if a.level in LEVEL_VALUES]


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    ratios: tuple[float, float, float] = (0.80, 0.10, 0.10)
    per_source: bool = True

    def __post_init__(self):
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise FormatError("split ratios must sum to 1")


def format_score(score: Fraction | float, places: int = 6) -> str:
    """Fixed-point decimal rendering, round half even."""
    if isinstance(score, Fraction):
        dec = Decimal(score.numerator) / Decimal(score.denominator)
    else:
        dec = Decimal(repr(float(score)))
    return str(dec.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


# ---------------------------------------------------------------------------
# Step: grouping


def _group_chunk(
    rows: Sequence[tuple[int, AnnotationRow]], key_mode: str
) -> dict[tuple[str, str, str], CommentGroup]:
    groups: dict[tuple[str, str, str], CommentGroup] = {}
    for ordinal, row in rows:
        text_key = (
            row.sentence_text
            if key_mode == "raw"
            else textnorm.normalize(row.sentence_text)
        )
        key = (row.source, row.article_id, text_key)
        group = groups.get(key)
        if group is None:
            group = CommentGroup(
                source=row.source,
                article_id=row.article_id,
                canonical_text=textnorm.normalize(row.sentence_text),
                raw_text=row.sentence_text,
                kind=row.kind,
                annotations=[],
            )
            groups[key] = group
        elif row.kind == "comment" and group.kind == "control":
            group.kind = "comment"
        group.annotations.append(
            GroupAnnotation(row.level, row.dialect, row.annotator.worker_id)
        )
    return groups


def group_comments(
    rows: Iterable[AnnotationRow], key_mode: str = "normalized", jobs: int = 1
) -> list[CommentGroup]:
    """Group annotations by (source, article_id, text key).

    With jobs > 1 the rows are partitioned by a stable hash of the key, so
    every partition owns complete groups and the merged result is identical
    to the sequential one. Returned groups are ordered by first appearance.
    """
    if key_mode not in ("normalized", "raw"):
        raise FormatError("unknown grouping key mode %r" % key_mode)
    indexed = list(enumerate(rows))
    if jobs <= 1:
        merged = _group_chunk(indexed, key_mode)
    else:
        buckets: list[list[tuple[int, AnnotationRow]]] = [[] for _ in range(jobs)]
        for ordinal, row in indexed:
            text_key = (
                row.sentence_text
                if key_mode == "raw"
                else textnorm.normalize(row.sentence_text)
            )
            digest = zlib.crc32(
                "\t".join((row.source, row.article_id, text_key)).encode("utf-8")
            )
            buckets[digest % jobs].append((ordinal, row))
        merged = {}
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(lambda b: _group_chunk(b, key_mode), buckets):
                merged.update(part)
    # first-appearance order, independent of partitioning
    order: dict[tuple[str, str, str], int] = {}
    for ordinal, row in indexed:
        text_key = (
            row.sentence_text
            if key_mode == "raw"
            else textnorm.normalize(row.sentence_text)
        )
        key = (row.source, row.article_id, text_key)
        if key not in order:
            order[key] = ordinal
    return [merged[key] for key in sorted(merged, key=order.__getitem__)]


def count_distinct_keys(rows: Iterable[AnnotationRow], key_mode: str) -> int:
    seen = set()
    for row in rows:
        text_key = (
            row.sentence_text
            if key_mode == "raw"
            else textnorm.normalize(row.sentence_text)
        )
        seen.add((row.source, row.article_id, text_key))
    return len(seen)


# ---------------------------------------------------------------------------
# Step: junk removal


def discard_junk(
    groups: Sequence[CommentGroup],
) -> tuple[list[CommentGroup], list[CommentGroup]]:
    """Partition groups into (kept, discarded) by the 2/3 junk rule."""
    kept: list[CommentGroup] = []
    discarded: list[CommentGroup] = []
    for group in groups:
        total = len(group.annotations)
        if total == 0:
            raise AldiError(
                "group (%s, %s) has no annotations" % (group.source, group.article_id)
            )
        junk = sum(1 for a in group.annotations if a.level in UNUSABLE_LEVELS)
        if 3 * junk >= 2 * total:
            discarded.append(group)
        else:
            kept.append(group)
    return kept, discarded


_URL_RE = re.compile(r"(?:https?|ftp)://\S+|\bwww\.\S+", re.IGNORECASE)
_EMAIL_RE = re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")
_HTML_MARKERS = ("&#", "<a ", "</")
_LATINISH_RE = re.compile(r"^[A-Za-z0-9'\-]*[A-Za-z][A-Za-z0-9'\-]*$")


def categorize_discard(group: CommentGroup) -> str:
    """Rule-based taxonomy of why a discarded group is junk."""
    text = group.raw_text
    if _URL_RE.search(text) or _EMAIL_RE.search(text):
        return "UrlOrEmail"
    if any(marker in text for marker in _HTML_MARKERS):
        return "HtmlArtifacts"
    compact = [ch for ch in text if not ch.isspace()]
    if compact and all(textnorm._is_punct(ch) for ch in compact):
        return "Symbols"
    tokens = textnorm.tokenize(textnorm.normalize(text))
    words = [t for t in tokens if not all(textnorm._is_punct(ch) for ch in t)]
    if words:
        latin = [t for t in words if _LATINISH_RE.match(t)]
        if 5 * len(latin) >= 4 * len(words):
            if any(any(ch.isdigit() for ch in t) for t in latin):
                return "Arabizi"
            return "English"
    return "Other"


# ---------------------------------------------------------------------------
# Step: aggregation


def aggregate(group: CommentGroup) -> Fraction:
    """Mean dialectness of the usable (ordinal) annotations, in [0, 1]."""
    values = [LEVEL_VALUES[a.level] for a in group.annotations if a.level in LEVEL_VALUES]
    if not values:
        raise AldiError(
            "group (%s, %s) has no usable level annotations"
            % (group.source, group.article_id)
        )
    return sum(values, Fraction(0)) / len(values)


# ---------------------------------------------------------------------------
# Step: splits


def load_assignment(path: str | Path) -> dict[tuple[str, str] | str, str]:
    """Read an article-to-split sidecar file.

    Accepts 3 columns (source, article_id, split) or 2 (article_id, split);
    an optional header line is skipped.
    """
    assignment: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if lineno == 1 and cells[-1] == "split":
                continue
            if len(cells) == 3:
                key: tuple[str, str] | str = (cells[0], cells[1])
            elif len(cells) == 2:
                key = cells[0]
            else:
                raise FormatError(
                    "%s: line %d must have 2 or 3 columns" % (path, lineno)
                )
            split = cells[-1].strip().lower()
            if split not in ("train", "dev", "test"):
                raise FormatError(
                    "%s: line %d has unknown split %r" % (path, lineno, cells[-1])
                )
            assignment[key] = split
    return assignment


def make_splits(
    groups: Sequence[CommentGroup],
    plan: SplitPlan,
    assignment: dict | None = None,
) -> None:
    """Assign a split to every group, keeping articles split-exclusive.

    Without an assignment file: per source, article ids are sorted, shuffled
    by a seeded RNG, and consumed in order; articles go to train until the
    cumulative group count first reaches >=80% of the source, then to dev
    until >=90%, remainder to test.
    """
    if assignment is not None:
        for group in groups:
            split = assignment.get((group.source, group.article_id))
            if split is None:
                split = assignment.get(group.article_id)
            if split is None:
                raise FormatError(
                    "assignment file does not cover article %r of source %s"
                    % (group.article_id, group.source)
                )
            group.split = split
        return

    for source in sorted({g.source for g in groups}):
        source_groups = [g for g in groups if g.source == source]
        per_article = Counter(g.article_id for g in source_groups)
        articles = sorted(per_article)
        if len(articles) < 3:
            raise FormatError(
                "source %s has only %d article(s); need at least 3 to split"
                % (source, len(articles))
            )
        rng = random.Random("%d:%s" % (plan.seed, source))
        rng.shuffle(articles)
        total = len(source_groups)
        split_of: dict[str, str] = {}
        cumulative = 0
        phase = "train"
        for article in articles:
            split_of[article] = phase
            cumulative += per_article[article]
            if phase == "train" and 5 * cumulative >= 4 * total:
                phase = "dev"
            elif phase == "dev" and 10 * cumulative >= 9 * total:
                phase = "test"
        for group in source_groups:
            group.split = split_of[group.article_id]


# ---------------------------------------------------------------------------
# Step: statistics


def _aldi_bin(score: Fraction) -> int:
    if score < Fraction(1, 4):
        return 0
    if score < Fraction(1, 2):
        return 1
    if score < Fraction(3, 4):
        return 2
    return 3


def corpus_stats(
    groups: Sequence[CommentGroup],
    discarded: Sequence[CommentGroup] = (),
    discard_categories: dict[int, str] | None = None,
) -> dict:
    """Annotation- and group-level statistics of the built dataset."""
    by_kind_level: dict[str, Counter] = {"comment": Counter(), "control": Counter()}
    dialect_level: dict[str, Counter] = {}
    everything = list(groups) + list(discarded)
    for group in everything:
        for ann in group.annotations:
            by_kind_level[group.kind][ann.level] += 1
            if ann.dialect:
                dialect_level.setdefault(ann.dialect, Counter())[ann.level] += 1

    annotations: dict = {}
    totals = {kind: sum(c.values()) for kind, c in by_kind_level.items()}
    all_counter: Counter = Counter()
    for counter in by_kind_level.values():
        all_counter.update(counter)
    for kind, counter in (
        ("comment", by_kind_level["comment"]),
        ("control", by_kind_level["control"]),
        ("all", all_counter),
    ):
        total = sum(counter.values())
        annotations[kind] = {
            "total": total,
            "levels": {
                level: {
                    "count": counter.get(level, 0),
                    "percent": (100.0 * counter.get(level, 0) / total) if total else 0.0,
                }
                for level in LEVELS
            },
        }

    histogram = {"all": [0, 0, 0, 0], "comment": [0, 0, 0, 0], "control": [0, 0, 0, 0]}
    split_counts: dict[str, dict[str, Counter]] = {}
    for group in groups:
        if group.aldi is not None:
            b = _aldi_bin(group.aldi)
            histogram["all"][b] += 1
            histogram[group.kind][b] += 1
        if group.split is not None:
            split_counts.setdefault(group.split, {}).setdefault(
                group.source, Counter()
            )[group.kind] += 1

    ws_counts = []
    token_counts = []
    for group in groups:
        ws, tok = textnorm.word_count(group.canonical_text)
        ws_counts.append(ws)
        token_counts.append(tok)

    category_counter: Counter = Counter()
    if discard_categories:
        category_counter.update(discard_categories.values())

    stats = {
        "annotations": annotations,
        "dialect_level": {
            dialect: {level: counter.get(level, 0) for level in LEVELS}
            for dialect, counter in sorted(dialect_level.items())
        },
        "aldi_histogram": {"bins": list(ALDI_BINS), "counts": histogram},
        "groups": {
            "kept": len(groups),
            "discarded": len(discarded),
            "total": len(groups) + len(discarded),
            "more_than_three_annotations": sum(
                1 for g in everything if len(g.annotations) > 3
            ),
        },
        "discard_categories": {
            cat: category_counter.get(cat, 0) for cat in DISCARD_CATEGORIES
        },
        "comment_length": {
            "whitespace_mean": (sum(ws_counts) / len(ws_counts)) if ws_counts else 0.0,
            "token_mean": (sum(token_counts) / len(token_counts))
            if token_counts
            else 0.0,
        },
        "splits": {
            split: {
                source: dict(kinds) for source, kinds in sorted(by_source.items())
            }
            for split, by_source in sorted(split_counts.items())
        },
    }
    return stats


def render_stats_text(stats: dict) -> str:
    """Aligned plain-text rendering of :func:`corpus_stats` output."""
    lines: list[str] = []
    ann = stats["annotations"]
    header = ["Type"] + list(LEVELS) + ["Total"]
    table = [header]
    for kind in ("comment", "control", "all"):
        row = [kind.capitalize()]
        for level in LEVELS:
            cell = ann[kind]["levels"][level]
            row.append("%d (%.2f%%)" % (cell["count"], cell["percent"]))
        row.append(str(ann[kind]["total"]))
        table.append(row)
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines.append("Level-of-dialectness annotations")
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    lines.append("")

    lines.append("Aggregated score histogram (kept groups)")
    hist = stats["aldi_histogram"]
    lines.append("  ".join("%-12s" % b for b in hist["bins"]))
    for kind in ("all", "comment", "control"):
        lines.append(
            "  ".join("%-12d" % c for c in hist["counts"][kind]) + "  " + kind
        )
    lines.append("")

    g = stats["groups"]
    lines.append("Groups: %d total, %d kept, %d discarded" % (
        g["total"], g["kept"], g["discarded"]))
    lines.append(
        "Groups with >3 annotations: %d" % g["more_than_three_annotations"]
    )
    keys = stats.get("distinct_keys")
    if keys:
        lines.append(
            "Distinct keys: %d normalized, %d raw"
            % (keys["normalized"], keys["raw"])
        )
    cats = stats["discard_categories"]
    if any(cats.values()):
        lines.append("Discard categories: " + ", ".join(
            "%s=%d" % (cat, cats[cat]) for cat in DISCARD_CATEGORIES))
    length = stats["comment_length"]
    lines.append(
        "Mean length: %.2f whitespace words, %.2f detached tokens"
        % (length["whitespace_mean"], length["token_mean"])
    )
    if stats["splits"]:
        lines.append("")
        lines.append("Split counts (groups)")
        for split in ("train", "dev", "test"):
            if split not in stats["splits"]:
                continue
            for source, kinds in stats["splits"][split].items():
                lines.append(
                    "  %-5s %-9s comment=%-6d control=%d"
                    % (split, source, kinds.get("comment", 0), kinds.get("control", 0))
                )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Serialization


def _spread(values: Sequence[str]) -> tuple[str, str, str]:
    """First two values in their own cells, the rest joined in the third."""
    first = values[0] if len(values) > 0 else ""
    second = values[1] if len(values) > 1 else ""
    third = ";".join(values[2:]) if len(values) > 2 else ""
    return first, second, third


def dataset_lines(groups: Sequence[CommentGroup]) -> Iterable[str]:
    yield "\t".join(DATASET_HEADER)
    ordered = sorted(groups, key=lambda g: (g.source, g.article_id, g.canonical_text))
    for g in ordered:
        levels = _spread([a.level for a in g.annotations])
        dialects = _spread([a.dialect or "" for a in g.annotations])
        yield "\t".join(
            (
                g.source,
                g.article_id,
                g.kind,
                g.raw_text.replace("\t", " ").replace("\n", " "),
                *levels,
                *dialects,
                format_score(g.aldi) if g.aldi is not None else "",
                g.split or "",
            )
        )


def discarded_lines(
    discarded: Sequence[CommentGroup], categories: dict[int, str]
) -> Iterable[str]:
    yield "\t".join(DISCARDED_HEADER)
    ordered = sorted(
        discarded, key=lambda g: (g.source, g.article_id, g.canonical_text)
    )
    for g in ordered:
        yield "\t".join(
            (
                g.source,
                g.article_id,
                g.kind,
                categories[id(g)],
                ";".join(a.level for a in g.annotations),
                g.raw_text.replace("\t", " ").replace("\n", " "),
            )
        )


def assignment_lines(groups: Sequence[CommentGroup]) -> Iterable[str]:
    yield "source\tarticle_id\tsplit"
    seen = set()
    for g in sorted(groups, key=lambda g: (g.source, g.article_id)):
        key = (g.source, g.article_id)
        if key in seen or g.split is None:
            continue
        seen.add(key)
        yield "%s\t%s\t%s" % (g.source, g.article_id, g.split)
