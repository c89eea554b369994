"""Score-quality evaluation: RMSE, discrimination, distributions, filters.

Everything here is pure over immutable inputs. The discrimination measure
divides the absolute mean difference of two score populations by their
pooled standard deviation; sample variance (n-1) is the default with a
population-variance switch, since the convention is not pinned down
anywhere authoritative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import textnorm
from .errors import AldiError, FormatError


@dataclass(frozen=True)
class ScoredPair:
    gold: float
    predicted: float
    subset: str  # "control" | "comment"


def rmse(pairs: Sequence[ScoredPair], subset: str | None = None) -> float:
    """Root mean squared error of predicted vs gold, optionally filtered."""
    selected = [p for p in pairs if subset is None or p.subset == subset]
    if not selected:
        raise FormatError(
            "rmse over an empty selection" + (" (subset=%s)" % subset if subset else "")
        )
    return math.sqrt(
        math.fsum((p.gold - p.predicted) ** 2 for p in selected) / len(selected)
    )


def rmse_report(pairs: Sequence[ScoredPair]) -> dict:
    """Control / comment / all RMSE with their sample sizes."""
    report = {}
    for name, subset in (("control", "control"), ("comment", "comment"), ("all", None)):
        selected = [p for p in pairs if subset is None or p.subset == subset]
        report[name] = {
            "n": len(selected),
            "rmse": rmse(pairs, subset) if selected else None,
        }
    return report


def _variance(values: Sequence[float], sample: bool) -> float:
    n = len(values)
    mean = math.fsum(values) / n
    ss = math.fsum((v - mean) ** 2 for v in values)
    return ss / (n - 1) if sample else ss / n


def d_prime(
    group_a: Sequence[float],
    group_b: Sequence[float],
    sample_variance: bool = True,
) -> float:
    """Discrimination between two score populations.

    |mean_a - mean_b| / sqrt((var_a + var_b) / 2). Zero pooled variance is
    only defined when the means agree too (result 0).
    """
    if len(group_a) < 2 or len(group_b) < 2:
        raise FormatError("d_prime needs at least 2 values per group")
    mean_a = math.fsum(group_a) / len(group_a)
    mean_b = math.fsum(group_b) / len(group_b)
    pooled = (_variance(group_a, sample_variance) + _variance(group_b, sample_variance)) / 2.0
    if pooled == 0.0:
        if mean_a == mean_b:
            return 0.0
        raise AldiError("d_prime undefined: zero variance with distinct means")
    return abs(mean_a - mean_b) / math.sqrt(pooled)


@dataclass(frozen=True)
class DistributionSummary:
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    n: int


def _median(sorted_values: Sequence[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2:
        return sorted_values[mid]
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2.0


def summarize_distribution(scores: Sequence[float]) -> DistributionSummary:
    """Box-plot summary: median-exclusive quartiles, 1.5*IQR whiskers.

    Quartiles via the median-of-halves rule, the median element excluded
    from both halves when the count is odd. Whiskers are the most extreme
    observed values within [q1 - 1.5*IQR, q3 + 1.5*IQR]; points beyond are
    outliers.
    """
    if not scores:
        raise FormatError("cannot summarize an empty score list")
    values = sorted(float(s) for s in scores)
    n = len(values)
    median = _median(values)
    half = n // 2
    if half == 0:
        q1 = q3 = median
    else:
        q1 = _median(values[:half])
        q3 = _median(values[n - half :])
    iqr = q3 - q1
    low_bound = q1 - 1.5 * iqr
    high_bound = q3 + 1.5 * iqr
    inside = [v for v in values if low_bound <= v <= high_bound]
    outliers = tuple(v for v in values if v < low_bound or v > high_bound)
    # quartiles are interpolated, so at least one observation is always inside
    whisker_low = inside[0]
    whisker_high = inside[-1]
    return DistributionSummary(median, q1, q3, whisker_low, whisker_high, outliers, n)


# ---------------------------------------------------------------------------
# Parallel-corpus filtering


@dataclass(frozen=True)
class Dial2MsaRecord:
    dialect: str
    dialect_tweet: str
    msa_translations: tuple[str, ...]
    confidence: float | None


def filter_dial2msa(
    records: Sequence[Dial2MsaRecord],
    distinctive_terms: dict[str, Sequence[str]],
    max_confidence: float = 1.0,
) -> list[Dial2MsaRecord]:
    """Keep only perfectly validated records with clean MSA translations.

    A record survives iff its confidence equals the maximum possible value
    and no configured distinctive dialectal term (for its dialect) occurs
    among the normalized tokens of any of its MSA translations. Records
    without a confidence are skipped with a warning.
    """
    term_sets = {
        dialect: {textnorm.normalize(t) for t in terms}
        for dialect, terms in distinctive_terms.items()
    }
    kept = []
    for record in records:
        if record.confidence is None:
            warnings.warn(
                "record without confidence skipped: %r" % record.dialect_tweet[:40],
                stacklevel=2,
            )
            continue
        if record.confidence != max_confidence:
            continue
        terms = term_sets.get(record.dialect, set())
        dirty = any(
            token in terms
            for translation in record.msa_translations
            for token in textnorm.tokenize(textnorm.normalize(translation))
        )
        if not dirty:
            kept.append(record)
    return kept


# ---------------------------------------------------------------------------
# Contrastive feature pairs


VARIANTS = ("MSA", "EGY")


@dataclass(frozen=True)
class ContrastivePair:
    feature_id: str
    variant: str
    word_order: str
    gender: str
    text: str


@dataclass
class ContrastiveRow:
    feature_id: str
    word_order: str
    # estimator id -> variant -> gender -> score
    scores: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    flagged: set[str] = field(default_factory=set)


PAIRS_HEADER = ("feature_id", "variant", "word_order", "gender", "text")


def read_pairs_file(path: str | Path) -> list[ContrastivePair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if lineno == 1 and tuple(cells) == PAIRS_HEADER:
                continue
            if len(cells) != len(PAIRS_HEADER):
                raise FormatError(
                    "%s: line %d has %d columns, expected %d"
                    % (path, lineno, len(cells), len(PAIRS_HEADER))
                )
            feature_id, variant, word_order, gender, text = cells
            if variant not in VARIANTS:
                raise FormatError(
                    "%s: line %d has unknown variant %r" % (path, lineno, variant)
                )
            pairs.append(ContrastivePair(feature_id, variant, word_order, gender, text))
    return pairs


def contrastive_matrix(
    pairs: Sequence[ContrastivePair], estimators: Sequence
) -> list[ContrastiveRow]:
    """Score every pair text with every estimator, Table-style rows.

    Rows are keyed by (feature_id, word_order); each must carry both an MSA
    and an EGY variant. An estimator is flagged on a row when it scores the
    MSA variant at or above the EGY variant for any gender present on both
    sides (a dialectness estimator must separate them the other way).
    """
    texts = [p.text for p in pairs]
    rows: dict[tuple[str, str], ContrastiveRow] = {}
    order: list[tuple[str, str]] = []
    for p in pairs:
        key = (p.feature_id, p.word_order)
        if key not in rows:
            rows[key] = ContrastiveRow(p.feature_id, p.word_order)
            order.append(key)

    for estimator in estimators:
        scores = estimator.score_many(texts)
        for p, score in zip(pairs, scores):
            row = rows[(p.feature_id, p.word_order)]
            row.scores.setdefault(estimator.estimator_id, {}).setdefault(
                p.variant, {}
            )[p.gender] = score

    for key in order:
        row = rows[key]
        for estimator_id, by_variant in row.scores.items():
            for variant in VARIANTS:
                if variant not in by_variant:
                    raise FormatError(
                        "feature %s (%s) is missing its %s variant"
                        % (row.feature_id, row.word_order, variant)
                    )
            msa, egy = by_variant["MSA"], by_variant["EGY"]
            common = sorted(set(msa) & set(egy))
            if common:
                if any(msa[g] >= egy[g] for g in common):
                    row.flagged.add(estimator_id)
            else:
                mean = lambda d: sum(d.values()) / len(d)
                if mean(msa) >= mean(egy):
                    row.flagged.add(estimator_id)
    return [rows[key] for key in order]


_GENDER_ORDER = {"masc": 0, "fem": 1}


def _gender_key(gender: str) -> tuple[int, str]:
    return (_GENDER_ORDER.get(gender, 2), gender)


def _collapse(by_gender: dict[str, float], fmt: Callable[[float], str]) -> str:
    genders = sorted(by_gender, key=_gender_key)
    rendered = [fmt(by_gender[g]) for g in genders]
    if len(set(rendered)) == 1:
        return rendered[0]
    return " / ".join(rendered)


def render_matrix_tsv(
    rows: Sequence[ContrastiveRow], fmt: Callable[[float], str]
) -> str:
    """Feature x estimator table; masculine/feminine collapsed when equal."""
    estimator_ids = sorted({eid for row in rows for eid in row.scores})
    header = ["feature_id", "word_order"]
    for eid in estimator_ids:
        header += ["%s:MSA" % eid, "%s:EGY" % eid]
    header.append("flags")
    lines = ["\t".join(header)]
    for row in rows:
        cells = [row.feature_id, row.word_order]
        for eid in estimator_ids:
            by_variant = row.scores.get(eid, {})
            for variant in VARIANTS:
                cells.append(
                    _collapse(by_variant[variant], fmt) if variant in by_variant else ""
                )
        cells.append(",".join(sorted(row.flagged)))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
