"""Acceptance suite: one test per release criterion, at fixed tolerances.

Headline numbers from large neural models are out of reach on a workstation,
so acceptance rests on metric identities, exact invariants of the built-in
models, and brute-force oracle agreement on randomized inputs. Run with
``pytest tests/test_acceptance.py -v`` for one line per criterion.
"""

from __future__ import annotations

import itertools
import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from shuftext.adapter import run_protocol_check
from shuftext.augment import overall_accuracy, run_experiment1, select_generic
from shuftext.cli import main
from shuftext.corpus import Example, LengthSummary
from shuftext.evaluate import boxplot_stats, run_shuftext
from shuftext.models import NaiveBayes, NgramLogisticRegression
from shuftext.shuffle import SplitMix64, shuffle_tokens

from synth import bigram_order_dataset, keyword_dataset, write_tsv


def test_overall_accuracy_identity_matches_reference_rows():
    """Micro-average identity reproduces three published result rows +-0.05."""
    rows = [
        (71.77, 1821, 61.28, 67.39),
        (68.09, 1821, 33.06, 53.90),
        (85.0, 500, 72.23, 79.13),
    ]
    for orig, n_orig, shuf, expected in rows:
        n_shuf = round(orig / 100 * n_orig)
        got = overall_accuracy(orig, n_orig, shuf, n_shuf)
        assert got == pytest.approx(expected, abs=0.05), (orig, n_orig, shuf)


def test_keyword_model_same_prediction_is_exactly_total():
    """Bag-of-words NB on a 1k-sentence corpus: 100.00 and identical probs."""
    dataset = keyword_dataset(n_train=700, n_test=300, seed=401)
    report = run_shuftext(NaiveBayes(), dataset, seed=11)
    assert report.same_prediction_pct == 100.00
    checked = 0
    for record in report.records:
        if record.shuffled_pred is not None:
            assert record.shuffled_pred.label == record.original_pred.label
            assert record.shuffled_pred.probs == record.original_pred.probs  # exact
            checked += 1
    assert checked > 0


def test_shuffled_class_augmentation_cannot_fool_keyword_model():
    """Under the new shuffled class, NB still pairs predictions exactly."""
    dataset = keyword_dataset(n_train=400, n_test=200, seed=402)
    report = run_experiment1(NaiveBayes(), dataset, seed=13)
    pairs = 0
    for record in report.records:
        if record.shuffled_pred is not None:
            assert record.shuffled_pred == record.original_pred  # field-for-field
            pairs += 1
    assert pairs > 0
    assert report.shuffled_test_accuracy == 0.00


def test_order_sensitive_and_keyword_models_are_distinguished():
    """Bigram-decided corpus separates the two built-in model families."""
    dataset = bigram_order_dataset(n_pairs_train=300, n_pairs_test=200, seed=2024)
    assert len(dataset.train) + len(dataset.test) >= 500

    lr_report = run_shuftext(NgramLogisticRegression(seed=0), dataset, seed=17)
    assert lr_report.original_test_accuracy >= 95.0
    assert lr_report.same_prediction_pct <= 60.0

    nb_report = run_shuftext(NaiveBayes(), dataset, seed=17)
    assert nb_report.original_test_accuracy <= 60.0


def test_shuffle_preserves_multisets_and_is_deterministic():
    """10^4 random token lists: multiset preserved, replay identical."""
    case_rng = SplitMix64(910)
    for _ in range(10_000):
        n = case_rng.randbelow(12)
        tokens = [f"t{case_rng.randbelow(8)}" for _ in range(n)]
        seed = case_rng.next_u64()
        first = shuffle_tokens(tokens, SplitMix64(seed))
        assert Counter(first) == Counter(tokens)
        assert first == shuffle_tokens(tokens, SplitMix64(seed))


def test_three_token_permutations_are_uniform():
    """Each of the 6 permutations within 1/6 +- 0.02 over 10^4 shuffles."""
    rng = SplitMix64(77)
    counts = Counter(tuple(shuffle_tokens(("a", "b", "c"), rng)) for _ in range(10_000))
    assert set(counts) == set(itertools.permutations(("a", "b", "c")))
    for perm, count in counts.items():
        assert abs(count / 10_000 - 1 / 6) <= 0.02, (perm, count)


def test_generic_selection_respects_bounds_and_disjointness():
    """10^3 randomized cases: inclusive [q1, q3] filter, disjoint draws."""
    case_rng = SplitMix64(5150)
    for case in range(1_000):
        corpus = []
        for i in range(40):
            length = 1 + case_rng.randbelow(12)
            tokens = tuple(["w"] * length)
            corpus.append(Example(f"generic:{i + 1}", " ".join(tokens), tokens, "__generic__"))
        bounds = LengthSummary(1.0, float(1 + case_rng.randbelow(12)))
        pool_size = sum(1 for ex in corpus if bounds.q1 <= len(ex.tokens) <= bounds.q3)
        n = pool_size // 3
        if n == 0:
            continue
        seed = case_rng.next_u64()
        train_side = select_generic(corpus, bounds, n, seed, stream="generic-draw:train")
        test_side = select_generic(
            corpus,
            bounds,
            min(n, pool_size - n),
            seed,
            exclude_ids={ex.id for ex in train_side},
            stream="generic-draw:test",
        )
        for ex in train_side + test_side:
            assert bounds.q1 <= len(ex.tokens) <= bounds.q3, case
        train_ids = {ex.id for ex in train_side}
        test_ids = {ex.id for ex in test_side}
        assert not train_ids & test_ids, case


def _boxplot_oracle(values):
    """Brute force: sort, direct (n-1)p interpolation, fence scan."""
    xs = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.percentile(xs, [25, 50, 75])
    reach = 1.5 * (q3 - q1)
    lo_fence, hi_fence = q1 - reach, q3 + reach
    inside_lo = xs[xs >= lo_fence]
    lower = inside_lo.min() if inside_lo.min() <= q1 else q1
    inside_hi = xs[xs <= hi_fence]
    upper = inside_hi.max() if inside_hi.max() >= q3 else q3
    n_outliers = int(((xs < lo_fence) | (xs > hi_fence)).sum())
    return med, q1, q3, lower, upper, n_outliers


def test_boxplot_stats_match_bruteforce_oracle():
    """10^3 random probability vectors, agreement to 1e-12."""
    rng = SplitMix64(31337)
    for case in range(1_000):
        size = 1 + rng.randbelow(100)
        values = [rng.next_u64() / 2**64 for _ in range(size)]
        stats = boxplot_stats(values, "c")
        med, q1, q3, lower, upper, n_outliers = _boxplot_oracle(values)
        assert abs(stats.median - med) <= 1e-12, case
        assert abs(stats.q1 - q1) <= 1e-12, case
        assert abs(stats.q3 - q3) <= 1e-12, case
        assert abs(stats.lower_whisker - lower) <= 1e-12, case
        assert abs(stats.upper_whisker - upper) <= 1e-12, case
        assert stats.n_outliers == n_outliers, case


def test_end_to_end_runs_are_byte_identical(tmp_path):
    """Two identical CLI invocations produce byte-identical artifacts."""
    dataset = keyword_dataset(n_train=90, n_test=45, seed=403)
    train = write_tsv(tmp_path / "train.tsv", [(ex.label, ex.text) for ex in dataset.train])
    test = write_tsv(tmp_path / "test.tsv", [(ex.label, ex.text) for ex in dataset.test])
    argv_tail = [
        "--train", str(train), "--test", str(test),
        "--model", "builtin-nb", "--seed", "21",
        "--dataset-name", "synthetic", "--out",
    ]
    assert main(["run", *argv_tail, str(tmp_path / "out1")]) == 0
    assert main(["run", *argv_tail, str(tmp_path / "out2")]) == 0
    artifacts = [
        "shuftext/builtin-nb_synthetic.report.json",
        "shuftext/builtin-nb_synthetic.boxplot.csv",
        "shuftext/summary.csv",
    ]
    for rel in artifacts:
        first = (tmp_path / "out1" / rel).read_bytes()
        second = (tmp_path / "out2" / rel).read_bytes()
        assert first == second, rel
        assert first  # artifacts are non-empty


def test_example_adapter_passes_protocol_check():
    """The bundled example adapter conforms to the full wire protocol."""
    script = Path(__file__).resolve().parents[1] / "adapter" / "example_adapter.py"
    if not script.is_file():
        pytest.skip("example adapter not present")
    results = run_protocol_check(f"{sys.executable} {script}", timeout=30)
    assert [r.name for r in results] == [
        "hello",
        "predict-before-fit",
        "fit",
        "predict",
        "malformed-request-recovery",
        "id-echo",
        "simplex-validity",
    ]
    for result in results:
        assert result.passed, f"{result.name}: {result.detail}"
