import math
import random
import warnings
from pathlib import Path

import pytest

from aldikit.errors import AldiError, FormatError
from aldikit.estimators import BinaryDiEstimator, LexiconEstimator, load_lexicon
from aldikit.evaluation import (
    ContrastivePair,
    Dial2MsaRecord,
    ScoredPair,
    contrastive_matrix,
    d_prime,
    filter_dial2msa,
    read_pairs_file,
    render_matrix_tsv,
    rmse,
    rmse_report,
    summarize_distribution,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "aldikit" / "data"


# ---------------------------------------------------------------------------
# RMSE


def pairs_of(gold, predicted, subset="comment"):
    return [ScoredPair(g, p, subset) for g, p in zip(gold, predicted)]


def test_rmse_zero_when_equal():
    assert rmse(pairs_of([0.2, 0.9], [0.2, 0.9])) == 0.0


def test_rmse_unit_errors():
    assert rmse(pairs_of([0.0, 1.0], [1.0, 0.0])) == 1.0


def test_rmse_empty_selection():
    with pytest.raises(FormatError):
        rmse([])
    with pytest.raises(FormatError, match="control"):
        rmse(pairs_of([0.1], [0.1]), subset="control")


def test_rmse_symmetric_and_permutation_invariant():
    rng = random.Random(4)
    gold = [rng.random() for _ in range(20)]
    pred = [rng.random() for _ in range(20)]
    forward = rmse(pairs_of(gold, pred))
    assert rmse(pairs_of(pred, gold)) == pytest.approx(forward, abs=1e-15)
    shuffled = pairs_of(gold, pred)
    rng.shuffle(shuffled)
    assert rmse(shuffled) == pytest.approx(forward, abs=1e-12)


def test_rmse_decomposition_identity():
    rng = random.Random(17)
    pairs = pairs_of(
        [rng.random() for _ in range(40)],
        [rng.random() for _ in range(40)],
        subset="control",
    ) + pairs_of(
        [rng.random() for _ in range(60)],
        [rng.random() for _ in range(60)],
        subset="comment",
    )
    n_ctrl = 40
    n_cmnt = 60
    lhs = rmse(pairs) ** 2 * (n_ctrl + n_cmnt)
    rhs = rmse(pairs, "control") ** 2 * n_ctrl + rmse(pairs, "comment") ** 2 * n_cmnt
    assert abs(lhs - rhs) < 1e-9


def test_rmse_report_counts():
    pairs = pairs_of([0.0], [0.0], "control") + pairs_of([1.0], [0.0], "comment")
    report = rmse_report(pairs)
    assert report["control"]["n"] == 1
    assert report["comment"]["rmse"] == 1.0
    assert report["all"]["n"] == 2


# ---------------------------------------------------------------------------
# D-prime


def test_dprime_identical_groups():
    assert d_prime([0.3, 0.5], [0.3, 0.5]) == 0.0


def test_dprime_hand_value():
    assert d_prime([0.8, 1.0], [0.0, 0.2]) == pytest.approx(5.657, abs=1e-3)


def test_dprime_symmetry_shift_scale():
    rng = random.Random(23)
    for _ in range(200):
        a = [rng.random() for _ in range(rng.randrange(2, 12))]
        b = [rng.random() for _ in range(rng.randrange(2, 12))]
        base = d_prime(a, b)
        assert d_prime(b, a) == pytest.approx(base, abs=1e-12)
        shift = rng.uniform(-5, 5)
        assert d_prime([v + shift for v in a], [v + shift for v in b]) == pytest.approx(
            base, rel=1e-9
        )
        scale = rng.uniform(0.1, 10)
        assert d_prime([v * scale for v in a], [v * scale for v in b]) == pytest.approx(
            base, rel=1e-9
        )


def test_dprime_small_groups_error():
    with pytest.raises(FormatError):
        d_prime([0.5], [0.1, 0.2])


def test_dprime_zero_variance_distinct_means():
    with pytest.raises(AldiError, match="zero variance"):
        d_prime([0.5, 0.5], [0.1, 0.1])


def test_dprime_population_variant():
    sample = d_prime([0.8, 1.0], [0.0, 0.2], sample_variance=True)
    population = d_prime([0.8, 1.0], [0.0, 0.2], sample_variance=False)
    assert population == pytest.approx(sample * math.sqrt(2), rel=1e-12)


# ---------------------------------------------------------------------------
# distribution summary


def oracle_quartiles(values):
    """Median-of-halves with the median excluded on odd counts."""
    data = sorted(values)
    n = len(data)

    def med(chunk):
        k = len(chunk)
        mid = k // 2
        return chunk[mid] if k % 2 else (chunk[mid - 1] + chunk[mid]) / 2

    if n == 1:
        return data[0], data[0], data[0]
    half = n // 2
    return med(data[:half]), med(data), med(data[n - half:])


def test_summary_single_value():
    summary = summarize_distribution([0.4])
    assert (summary.q1, summary.median, summary.q3) == (0.4, 0.4, 0.4)
    assert (summary.whisker_low, summary.whisker_high) == (0.4, 0.4)
    assert summary.outliers == ()
    assert summary.n == 1


def test_summary_four_point_set_matches_oracle():
    values = [0, 0, 0, 1]
    q1, med, q3 = oracle_quartiles(values)
    summary = summarize_distribution(values)
    assert (summary.q1, summary.median, summary.q3) == (q1, med, q3)
    iqr = q3 - q1
    expected_outliers = tuple(
        v for v in sorted(values) if v < q1 - 1.5 * iqr or v > q3 + 1.5 * iqr
    )
    assert summary.outliers == expected_outliers


def test_summary_constant_list():
    summary = summarize_distribution([0.7] * 9)
    assert summary.q1 == summary.q3 == summary.median == 0.7
    assert summary.outliers == ()


def test_summary_quartiles_match_oracle_random():
    rng = random.Random(55)
    for _ in range(200):
        values = [rng.random() for _ in range(rng.randrange(1, 30))]
        q1, med, q3 = oracle_quartiles(values)
        summary = summarize_distribution(values)
        assert summary.q1 == pytest.approx(q1, abs=1e-12)
        assert summary.median == pytest.approx(med, abs=1e-12)
        assert summary.q3 == pytest.approx(q3, abs=1e-12)


def test_summary_outliers_partition_input():
    rng = random.Random(56)
    for _ in range(100):
        values = [rng.gauss(0, 1) for _ in range(rng.randrange(1, 40))]
        summary = summarize_distribution(values)
        inside = [
            v for v in values if summary.whisker_low <= v <= summary.whisker_high
        ]
        assert sorted(inside + list(summary.outliers)) == sorted(values)
        assert summary.q1 <= summary.median <= summary.q3


def test_summary_detects_outlier():
    values = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 5.0]
    summary = summarize_distribution(values)
    assert summary.outliers == (5.0,)
    assert summary.whisker_high == 0.07


# ---------------------------------------------------------------------------
# DIAL2MSA filtering


def record(confidence, translations=("ترجمة نظيفة",), dialect="EGY"):
    return Dial2MsaRecord(
        dialect=dialect,
        dialect_tweet="تغريدة",
        msa_translations=tuple(translations),
        confidence=confidence,
    )


TERMS = {"EGY": ["دلوقتي", "بقى"]}


def test_filter_keeps_perfect_clean():
    assert filter_dial2msa([record(1.0)], TERMS) == [record(1.0)]


def test_filter_drops_imperfect_confidence():
    assert filter_dial2msa([record(0.8)], TERMS) == []


def test_filter_drops_distinctive_term():
    dirty = record(1.0, translations=("سوف أذهب دلوقتي",))
    assert filter_dial2msa([dirty], TERMS) == []


def test_filter_skips_missing_confidence_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        kept = filter_dial2msa([record(None)], TERMS)
    assert kept == []
    assert any("confidence" in str(w.message) for w in caught)


def test_filter_term_lists_are_per_dialect():
    # the term is configured for EGY only, so an MGR record sails through
    mgr = record(1.0, translations=("سوف أذهب دلوقتي",), dialect="MGR")
    assert filter_dial2msa([mgr], TERMS) == [mgr]


# ---------------------------------------------------------------------------
# contrastive pairs


def fixture_estimator():
    return LexiconEstimator(load_lexicon(DATA_DIR / "contrastive_lexicon.txt"))


def test_contrastive_fixture_matrix():
    pairs = read_pairs_file(DATA_DIR / "contrastive_pairs_egy.tsv")
    rows = contrastive_matrix(pairs, [fixture_estimator()])
    by_key = {(r.feature_id, r.word_order): r for r in rows}
    for key, egy_expected in [
        (("F1", "VSO"), 1 / 3),
        (("F1", "SVO"), 1 / 3),
        (("F2", "VSO"), 1 / 3),
        (("F2", "SVO"), 1 / 3),
        (("F3", "VO"), 1 / 2),
        (("F3", "OV"), 1 / 2),
        (("F4", "VSO"), 1 / 3),
        (("F4", "SVO"), 1 / 3),
        (("F5", "VSO"), 1 / 2),
    ]:
        row = by_key[key]
        cell = row.scores["lexicon"]
        assert set(cell["MSA"].values()) == {0.0}, key
        assert set(cell["EGY"].values()) == {egy_expected}, key
        assert "lexicon" not in row.flagged


def test_contrastive_binary_di_columns():
    pairs = [
        ContrastivePair("F1", "MSA", "VSO", "fem", "جملة فصحى"),
        ContrastivePair("F1", "EGY", "VSO", "fem", "جملة عامية"),
    ]
    rows = contrastive_matrix(pairs, [BinaryDiEstimator(["MSA", "EGY"])])
    cell = rows[0].scores["binary-di"]
    assert cell["MSA"]["fem"] == 0.0
    assert cell["EGY"]["fem"] == 1.0


def test_contrastive_identical_texts_flagged():
    pairs = [
        ContrastivePair("F9", "MSA", "VSO", "fem", "نفس الجملة"),
        ContrastivePair("F9", "EGY", "VSO", "fem", "نفس الجملة"),
    ]
    est = fixture_estimator()
    rows = contrastive_matrix(pairs, [est])
    assert "lexicon" in rows[0].flagged


def test_contrastive_missing_variant_errors():
    pairs = [ContrastivePair("F1", "MSA", "VSO", "fem", "جملة")]
    with pytest.raises(FormatError, match="EGY"):
        contrastive_matrix(pairs, [fixture_estimator()])


def test_render_matrix_collapses_genders():
    pairs = [
        ContrastivePair("F1", "MSA", "VSO", "masc", "الحقيقة"),
        ContrastivePair("F1", "MSA", "VSO", "fem", "الحقيقة"),
        ContrastivePair("F1", "EGY", "VSO", "masc", "اتقالت"),
        ContrastivePair("F1", "EGY", "VSO", "fem", "الحقيقة اتقالت"),
    ]
    rows = contrastive_matrix(pairs, [fixture_estimator()])
    text = render_matrix_tsv(rows, lambda v: "%.2f" % v)
    line = text.splitlines()[1].split("\t")
    assert line[2] == "0.00"  # masc == fem, collapsed
    assert line[3] == "1.00 / 0.50"  # masc / fem kept apart
