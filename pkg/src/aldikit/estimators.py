"""Dialectness score producers.

Four estimators, all emitting scores in [0, 1]:

- lexicon: fraction of a sentence's tokens not found in a standard-language
  lexicon (built from a large MSA corpus with a frequency threshold),
- binary-di: 0 for a sentence labeled MSA by an external sentence-level
  dialect identifier, 1 for anything else (labels come from a file; the
  classifier itself is out of scope),
- cmi: code-mixing index over per-token dialect tags,
  n_egy / (n_egy + n_msa), 0 when neither tag occurs,
- external: arbitrary scorer process speaking a newline protocol
  (sentences in on stdin, one decimal per line out on stdout).

Lexicon membership is checked on normalized tokens (diacritics stripped):
large MSA corpora are mostly undiacritized, so diacritics on the input side
would only manufacture false out-of-vocabulary hits.
"""

from __future__ import annotations

import subprocess
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import textnorm
from .errors import FormatError, ProtocolError

TOKEN_TAGS = ("MSA", "EGY", "NamedEntity", "Ambiguous", "Mixed", "Other")

_TAG_ALIASES = {
    "msa": "MSA",
    "egy": "EGY",
    "namedentity": "NamedEntity",
    "named-entity": "NamedEntity",
    "named_entity": "NamedEntity",
    "ne": "NamedEntity",
    "ambiguous": "Ambiguous",
    "ambig": "Ambiguous",
    "mixed": "Mixed",
    "other": "Other",
}

# Sentence-DI label files may use any of these; MSA maps to 0, the rest to 1.
KNOWN_DI_LABELS = frozenset(
    {"MSA", "EGY", "LEV", "GLF", "MAG", "IRQ", "GEN", "TUN", "MOR", "MGR", "DA"}
)

LEXICON_MAGIC = "#aldi-lexicon v1"


@dataclass(frozen=True)
class Lexicon:
    """Set of standard-language tokens seen at least min_count times."""

    tokens: frozenset[str]
    min_count: int
    source_name: str = ""

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def __len__(self) -> int:
        return len(self.tokens)


def build_lexicon(
    corpus: Iterable[str],
    min_occurrences: int = 2,
    source_name: str = "",
    cfg: textnorm.NormalizationConfig = textnorm.DEFAULT_CONFIG,
) -> tuple[Lexicon, Counter]:
    """Count normalized tokens over corpus lines; keep those with
    frequency >= min_occurrences. Returns (lexicon, full counts)."""
    if min_occurrences < 1:
        raise FormatError("min_occurrences must be >= 1")
    counts: Counter = Counter()
    for line in corpus:
        counts.update(textnorm.tokenize(textnorm.normalize(line, cfg)))
    kept = frozenset(t for t, c in counts.items() if c >= min_occurrences)
    if not counts:
        warnings.warn("empty corpus produced an empty lexicon", stacklevel=2)
    return Lexicon(kept, min_occurrences, source_name), counts


def save_lexicon(
    lexicon: Lexicon, path: str | Path, counts: Counter | None = None
) -> None:
    """One sorted token per line, optional tab-separated count, v1 header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("%s min_count=%d\n" % (LEXICON_MAGIC, lexicon.min_count))
        for token in sorted(lexicon.tokens):
            if counts is not None:
                fh.write("%s\t%d\n" % (token, counts[token]))
            else:
                fh.write(token + "\n")


def load_lexicon(path: str | Path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(LEXICON_MAGIC):
            raise FormatError("%s: not a lexicon file (bad header)" % path)
        min_count = 1
        for part in header.split():
            if part.startswith("min_count="):
                try:
                    min_count = int(part.split("=", 1)[1])
                except ValueError:
                    raise FormatError("%s: unreadable min_count" % path) from None
        tokens = set()
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            tokens.add(line.split("\t", 1)[0])
    return Lexicon(frozenset(tokens), min_count, source_name=str(path))


def lexicon_score(
    sentence: str,
    lexicon: Lexicon,
    cfg: textnorm.NormalizationConfig = textnorm.DEFAULT_CONFIG,
) -> float:
    """Fraction of the sentence's tokens not found in the lexicon."""
    tokens = textnorm.tokenize(textnorm.normalize(sentence, cfg))
    if not tokens:
        raise FormatError("cannot score an empty sentence")
    oov = sum(1 for t in tokens if t not in lexicon)
    return oov / len(tokens)


def binary_di_score(label: str, known_labels: frozenset[str] = KNOWN_DI_LABELS) -> float:
    """0 for MSA, 1 for any other dialect label."""
    token = label.strip()
    if not token or token.upper() not in known_labels:
        raise FormatError("unknown sentence-DI label %r" % label)
    return 0.0 if token.upper() == "MSA" else 1.0


def cmi_score(tags: Sequence[str]) -> float:
    """Code-mixing index: n_egy / (n_egy + n_msa); 0 if neither tag occurs."""
    n_msa = 0
    n_egy = 0
    for tag in tags:
        if tag not in TOKEN_TAGS:
            raise FormatError("unknown token tag %r" % tag)
        if tag == "MSA":
            n_msa += 1
        elif tag == "EGY":
            n_egy += 1
    if n_msa + n_egy == 0:
        return 0.0
    return n_egy / (n_egy + n_msa)


def read_token_tag_file(path: str | Path) -> list[list[tuple[str, str]]]:
    """Parse 'token TAB tag' lines, blank line between sentences."""
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(
                    "%s: line %d must be 'token<TAB>tag'" % (path, lineno)
                )
            token, raw_tag = parts
            tag = _TAG_ALIASES.get(raw_tag.strip().lower())
            if tag is None:
                raise FormatError(
                    "%s: line %d has unknown tag %r" % (path, lineno, raw_tag)
                )
            current.append((token, tag))
    if current:
        sentences.append(current)
    return sentences


def read_label_file(path: str | Path) -> list[str]:
    """Sentence-DI labels, one per line, aligned with the scored sentences."""
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n").strip() for line in fh if line.strip()]


@dataclass(frozen=True)
class ExternalScorerConfig:
    """How to reach an external scorer process."""

    command: tuple[str, ...]
    batch_size: int | None = None


def _clip(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def external_score(
    sentences: Sequence[str], scorer: ExternalScorerConfig
) -> list[float]:
    """Score sentences through the external newline protocol.

    Sends normalized sentences, one per line, on the scorer's stdin; expects
    exactly one decimal per line back, in order. Scores are clipped to
    [0, 1]. Batch size bounds how many sentences one process invocation
    carries.
    """
    scores: list[float] = []
    batch = scorer.batch_size or len(sentences) or 1
    for start in range(0, len(sentences), batch):
        chunk = sentences[start : start + batch]
        payload = "".join(textnorm.normalize(s) + "\n" for s in chunk)
        try:
            proc = subprocess.run(
                list(scorer.command),
                input=payload.encode("utf-8"),
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
            )
        except OSError as exc:
            raise ProtocolError("cannot run scorer %s: %s" % (scorer.command, exc))
        if proc.returncode != 0:
            raise ProtocolError(
                "scorer exited with status %d: %s"
                % (proc.returncode, proc.stderr.decode("utf-8", "replace").strip())
            )
        lines = proc.stdout.decode("utf-8").splitlines()
        lines = [ln for ln in lines if ln.strip()]
        if len(lines) != len(chunk):
            raise ProtocolError(
                "scorer returned %d lines for %d sentences" % (len(lines), len(chunk))
            )
        for offset, line in enumerate(lines):
            try:
                value = float(line.strip())
            except ValueError:
                raise ProtocolError(
                    "scorer output line %d is not a number: %r"
                    % (start + offset + 1, line)
                ) from None
            scores.append(_clip(value))
    return scores


# ---------------------------------------------------------------------------
# Uniform batch interface used by the series/contrastive drivers


class LexiconEstimator:
    estimator_id = "lexicon"

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon

    def score_many(self, sentences: Sequence[str]) -> list[float]:
        return [_clip(lexicon_score(s, self.lexicon)) for s in sentences]


class BinaryDiEstimator:
    """Positional adapter: label i belongs to sentence i."""

    estimator_id = "binary-di"

    def __init__(self, labels: Sequence[str]):
        self.labels = list(labels)

    def score_many(self, sentences: Sequence[str]) -> list[float]:
        if len(sentences) != len(self.labels):
            raise FormatError(
                "have %d DI labels for %d sentences"
                % (len(self.labels), len(sentences))
            )
        return [binary_di_score(label) for label in self.labels]


class CmiEstimator:
    """Positional adapter: tag sequence i belongs to sentence i."""

    estimator_id = "cmi"

    def __init__(self, tag_sequences: Sequence[Sequence[str]]):
        self.tag_sequences = [list(t) for t in tag_sequences]

    def score_many(self, sentences: Sequence[str]) -> list[float]:
        if len(sentences) != len(self.tag_sequences):
            raise FormatError(
                "have %d tag sequences for %d sentences"
                % (len(self.tag_sequences), len(sentences))
            )
        return [_clip(cmi_score(tags)) for tags in self.tag_sequences]


class ExternalEstimator:
    estimator_id = "external"

    def __init__(self, config: ExternalScorerConfig):
        self.config = config

    def score_many(self, sentences: Sequence[str]) -> list[float]:
        return external_score(sentences, self.config)
