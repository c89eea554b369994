"""Parse raw AOC HIT exports into per-sentence annotation rows.

A HIT export is a tab-separated file where each line holds one crowdworker's
pass over 12 sentences (10 comments + 2 controls) plus the worker's personal
fields. Column positions vary between release variants, so the parser is
driven by an explicit column map (JSON) instead of hard-coded offsets; a
default map for the known public release ships in ``aldikit/data``.

The output of :func:`explode` is the flat annotation-row table every other
module consumes: one row per (sentence, annotator) pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import FormatError

LEVELS = ("MSA", "Little", "Mixed", "Most", "NotArabic", "Missing")
ORDINAL_LEVELS = ("MSA", "Little", "Mixed", "Most")
DIALECTS = ("EGY", "LEV", "GLF", "MAG", "IRQ", "GEN", "Unfamiliar", "Other")
SOURCES = ("AlGhad", "AlRiyadh", "Youm7")
KINDS = ("comment", "control")

SENTENCES_PER_HIT = 12
CONTROLS_PER_HIT = 2

# Raw files spell labels inconsistently ("most" vs "mostly dialectal", ...).
# Blank level cells map to Missing.
LEVEL_ALIASES = {
    "msa": "MSA",
    "little": "Little",
    "little dialectal": "Little",
    "mixed": "Mixed",
    "most": "Most",
    "mostly": "Most",
    "mostly dialectal": "Most",
    "not arabic": "NotArabic",
    "not_arabic": "NotArabic",
    "notarabic": "NotArabic",
    "missing": "Missing",
    "": "Missing",
}

DIALECT_ALIASES = {
    "egy": "EGY",
    "egyptian": "EGY",
    "lev": "LEV",
    "levantine": "LEV",
    "glf": "GLF",
    "gulf": "GLF",
    "mag": "MAG",
    "maghrebi": "MAG",
    "irq": "IRQ",
    "iraqi": "IRQ",
    "gen": "GEN",
    "general": "GEN",
    "unfamiliar": "Unfamiliar",
    "other": "Other",
    "": "",
}

SOURCE_ALIASES = {
    "alghad": "AlGhad",
    "ghad": "AlGhad",
    "gh": "AlGhad",
    "alriyadh": "AlRiyadh",
    "riyadh": "AlRiyadh",
    "ri": "AlRiyadh",
    "youm7": "Youm7",
    "y7": "Youm7",
    "alyoum7": "Youm7",
}

KIND_ALIASES = {
    "comment": "comment",
    "cmnt": "comment",
    "control": "control",
    "cntrl": "control",
}

ROWS_HEADER = (
    "source",
    "article_id",
    "kind",
    "level",
    "dialect",
    "worker_id",
    "residence",
    "native_speaker",
    "best_dialect",
    "sentence_text",
)


@dataclass(frozen=True)
class AnnotatorInfo:
    worker_id: str
    residence: str | None = None
    native_speaker: bool | None = None
    best_understood_dialect: str | None = None


@dataclass(frozen=True)
class AnnotationRow:
    source: str
    article_id: str
    sentence_text: str
    kind: str
    level: str
    dialect: str | None
    annotator: AnnotatorInfo


@dataclass(frozen=True)
class HitRow:
    hit_id: str
    annotator: AnnotatorInfo
    sentences: tuple[AnnotationRow, ...]


class ColumnMapConfig:
    """Column layout of one HIT export variant.

    JSON schema (all sentence fields take either an integer column index or
    ``{"value": "..."}`` for a constant)::

        {
          "hit_id": 0,                 # optional; line number when omitted
          "worker_id": 1,
          "residence": 2,              # optional annotator fields
          "native_speaker": 3,
          "best_dialect": 4,
          "source": {"value": "AlGhad"},
          "columns": 53,               # optional exact column count
          "level_aliases": {"pure msa": "MSA"},   # optional extras
          "sentences": [               # exactly 12 blocks
            {"article_id": 5, "text": 6, "level": 7, "dialect": 8,
             "kind": {"value": "control"}},
            ...
          ]
        }

    ``kind`` must be stated per block, either as a constant (positional
    controls) or as a column index (flagged controls); it is never guessed.
    """

    def __init__(self, raw: dict):
        self.raw = raw
        sentences = raw.get("sentences")
        if not isinstance(sentences, list) or len(sentences) != SENTENCES_PER_HIT:
            raise FormatError(
                "column map must declare exactly %d sentence blocks, got %s"
                % (SENTENCES_PER_HIT, "none" if sentences is None else len(sentences))
            )
        for i, block in enumerate(sentences):
            for field in ("text", "level", "kind"):
                if field not in block:
                    raise FormatError(
                        "sentence block %d is missing the %r field" % (i, field)
                    )
            if "source" not in block and "source" not in raw:
                raise FormatError(
                    "sentence block %d has no 'source' and no top-level default" % i
                )
        if "worker_id" not in raw:
            raise FormatError("column map is missing the 'worker_id' field")
        self.level_aliases = dict(LEVEL_ALIASES)
        self.level_aliases.update(
            {k.lower(): v for k, v in raw.get("level_aliases", {}).items()}
        )
        self.columns: int | None = raw.get("columns")
        self._min_columns = 1 + max(self._indices(raw))

    @staticmethod
    def _indices(raw: dict) -> Iterator[int]:
        def walk(node):
            if isinstance(node, int) and not isinstance(node, bool):
                yield node
            elif isinstance(node, dict):
                for key, sub in node.items():
                    if key == "value":
                        continue
                    yield from walk(sub)
            elif isinstance(node, list):
                for sub in node:
                    yield from walk(sub)

        yield from walk(
            {k: v for k, v in raw.items() if k not in ("columns", "level_aliases")}
        )

    @classmethod
    def load(cls, path: str | Path) -> "ColumnMapConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError("invalid column map %s: %s" % (path, exc)) from exc
        return cls(raw)

    @classmethod
    def default(cls) -> "ColumnMapConfig":
        return cls.load(Path(__file__).parent / "data" / "aoc_column_map.json")

    def check_width(self, cells: list[str], lineno: int) -> None:
        if self.columns is not None and len(cells) != self.columns:
            raise FormatError(
                "line %d: expected %d columns, found %d"
                % (lineno, self.columns, len(cells))
            )
        if len(cells) < self._min_columns:
            raise FormatError(
                "line %d: expected at least %d columns, found %d"
                % (lineno, self._min_columns, len(cells))
            )


def _cell(ref, cells: list[str], lineno: int, field: str) -> str:
    """Resolve a column-map field reference against one line's cells."""
    if ref is None:
        return ""
    if isinstance(ref, dict):
        if "value" in ref:
            return str(ref["value"])
        ref = ref.get("column")
    if isinstance(ref, int):
        try:
            return cells[ref].strip()
        except IndexError:
            raise FormatError(
                "line %d: column %d for %r is out of range" % (lineno, ref, field)
            ) from None
    raise FormatError("column map field %r has unusable reference %r" % (field, ref))


def parse_level(token: str, aliases: dict[str, str], lineno: int = 0) -> str:
    level = aliases.get(token.strip().lower())
    if level is None:
        where = " at line %d" % lineno if lineno else ""
        raise FormatError("unknown level label %r%s" % (token, where))
    return level


def parse_dialect(token: str, lineno: int = 0) -> str | None:
    dialect = DIALECT_ALIASES.get(token.strip().lower())
    if dialect is None:
        where = " at line %d" % lineno if lineno else ""
        raise FormatError("unknown dialect label %r%s" % (token, where))
    return dialect or None


def parse_source(token: str, lineno: int = 0) -> str:
    source = SOURCE_ALIASES.get(token.strip().lower())
    if source is None:
        where = " at line %d" % lineno if lineno else ""
        raise FormatError("unknown source %r%s" % (token, where))
    return source


def _parse_native(token: str) -> bool | None:
    token = token.strip().lower()
    if token in ("", "na", "n/a", "none"):
        return None
    if token in ("yes", "y", "true", "1"):
        return True
    if token in ("no", "n", "false", "0"):
        return False
    return None


def _parse_hit_line(
    cells: list[str], cmap: ColumnMapConfig, lineno: int
) -> HitRow:
    raw = cmap.raw
    worker_id = _cell(raw.get("worker_id"), cells, lineno, "worker_id")
    if not worker_id:
        raise FormatError("line %d: empty worker_id" % lineno)
    annotator = AnnotatorInfo(
        worker_id=worker_id,
        residence=_cell(raw.get("residence"), cells, lineno, "residence") or None,
        native_speaker=_parse_native(
            _cell(raw.get("native_speaker"), cells, lineno, "native_speaker")
        ),
        best_understood_dialect=_cell(
            raw.get("best_dialect"), cells, lineno, "best_dialect"
        )
        or None,
    )
    hit_id = _cell(raw.get("hit_id"), cells, lineno, "hit_id") or ("line-%d" % lineno)
    default_source = raw.get("source")

    rows = []
    for i, block in enumerate(raw["sentences"]):
        source = parse_source(
            _cell(block.get("source", default_source), cells, lineno, "source"), lineno
        )
        kind_token = _cell(block["kind"], cells, lineno, "kind").lower()
        kind = KIND_ALIASES.get(kind_token)
        if kind is None:
            raise FormatError(
                "line %d: sentence block %d has unknown kind %r" % (lineno, i, kind_token)
            )
        level = parse_level(
            _cell(block["level"], cells, lineno, "level"), cmap.level_aliases, lineno
        )
        dialect = parse_dialect(
            _cell(block.get("dialect"), cells, lineno, "dialect"), lineno
        )
        if level == "MSA":
            dialect = None
        rows.append(
            AnnotationRow(
                source=source,
                article_id=_cell(block.get("article_id"), cells, lineno, "article_id"),
                sentence_text=_cell(block["text"], cells, lineno, "text"),
                kind=kind,
                level=level,
                dialect=dialect,
                annotator=annotator,
            )
        )

    controls = sum(1 for r in rows if r.kind == "control")
    if controls != CONTROLS_PER_HIT:
        raise FormatError(
            "line %d: expected %d control cells, found %d"
            % (lineno, CONTROLS_PER_HIT, controls)
        )
    return HitRow(hit_id=hit_id, annotator=annotator, sentences=tuple(rows))


def parse_hit_file(
    path: str | Path,
    column_map: ColumnMapConfig,
    strict: bool = True,
    error_log: list[str] | None = None,
) -> Iterator[HitRow]:
    """Yield one HitRow per well-formed line of a tab-separated HIT export.

    In strict mode any malformed line raises FormatError (with its line
    number); otherwise the line is skipped and the message appended to
    ``error_log`` when given.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cells = line.split("\t")
            try:
                column_map.check_width(cells, lineno)
                yield _parse_hit_line(cells, column_map, lineno)
            except FormatError as exc:
                if strict:
                    raise
                if error_log is not None:
                    error_log.append(str(exc))


def explode(hit: HitRow) -> list[AnnotationRow]:
    """The 12 annotation rows of a HIT, annotator info shared, order kept."""
    return list(hit.sentences)


def _sanitize_text(text: str) -> str:
    # Text is the last column but still must not smuggle separators.
    return text.replace("\t", " ").replace("\n", " ").replace("\r", " ")


def format_row(r: AnnotationRow) -> str:
    native = "" if r.annotator.native_speaker is None else (
        "yes" if r.annotator.native_speaker else "no"
    )
    return "\t".join(
        (
            r.source,
            r.article_id,
            r.kind,
            r.level,
            r.dialect or "",
            r.annotator.worker_id,
            r.annotator.residence or "",
            native,
            r.annotator.best_understood_dialect or "",
            _sanitize_text(r.sentence_text),
        )
    )


def write_rows(rows: Iterable[AnnotationRow], fh: TextIO) -> int:
    """Write annotation rows as TSV with a header; returns the row count."""
    fh.write("\t".join(ROWS_HEADER) + "\n")
    count = 0
    for r in rows:
        fh.write(format_row(r) + "\n")
        count += 1
    return count


def read_rows(path: str | Path) -> Iterator[AnnotationRow]:
    """Read an annotation-row TSV produced by :func:`write_rows`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split("\t") != list(ROWS_HEADER):
            raise FormatError("%s: missing or wrong annotation-row header" % path)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) != len(ROWS_HEADER):
                raise FormatError(
                    "%s: line %d has %d columns, expected %d"
                    % (path, lineno, len(cells), len(ROWS_HEADER))
                )
            (source, article_id, kind, level, dialect, worker, residence,
             native, best, text) = cells
            if level not in LEVELS:
                raise FormatError(
                    "%s: line %d has unknown level %r" % (path, lineno, level)
                )
            if kind not in KINDS:
                raise FormatError(
                    "%s: line %d has unknown kind %r" % (path, lineno, kind)
                )
            yield AnnotationRow(
                source=source,
                article_id=article_id,
                sentence_text=text,
                kind=kind,
                level=level,
                dialect=dialect or None,
                annotator=AnnotatorInfo(
                    worker_id=worker,
                    residence=residence or None,
                    native_speaker={"yes": True, "no": False}.get(native),
                    best_understood_dialect=best or None,
                ),
            )
