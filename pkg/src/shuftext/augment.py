"""Training-set augmentation experiments.

Experiment 1 appends shuffled copies of training sentences under a new
``__shuffled__`` class and asks whether the model can learn to recognize
broken word order. Experiment 2 appends out-of-domain generic sentences
under a ``__generic__`` class, the usual out-of-scope-detection setup, and
checks that doing so leaves behavior on the original domain intact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .corpus import (
    GENERIC_LABEL,
    SHUFFLED_LABEL,
    Dataset,
    Example,
    LengthSummary,
    avg_class_size,
    length_iqr,
)
from .evaluate import (
    BoxPlotStats,
    EvalRecord,
    NO_CORRECT_SAMPLES,
    Prediction,
    accuracy,
    evaluate_pairs,
    per_class_boxplots,
    same_prediction_pct,
)
from .models import Classifier
from .shuffle import build_shuffled_set, shuffle_tokens, substream


@dataclass(frozen=True)
class GenericRecord:
    """Prediction for one generic (out-of-domain) test sample."""

    example_id: str
    pred: Prediction


@dataclass
class Exp1Report:
    dataset: str
    model: dict
    seed: int
    n_augmented: int
    original_test_accuracy: float
    shuffled_test_accuracy: float | None
    shuffled_test_accuracy_reason: str | None
    overall_test_accuracy: float
    per_class_boxplots_original: list[BoxPlotStats]
    per_class_boxplots_shuffled: list[BoxPlotStats]
    records: list[EvalRecord]
    manifest: object = None
    experiment: str = field(default="exp1", init=False)

    def boxplot_panels(self) -> list[tuple[str, list[BoxPlotStats]]]:
        return [
            ("original", self.per_class_boxplots_original),
            ("shuffled", self.per_class_boxplots_shuffled),
        ]


@dataclass
class Exp2Report:
    dataset: str
    model: dict
    seed: int
    n_augmented: int
    original_test_accuracy: float
    generic_sentence_accuracy: float
    same_prediction_pct: float | None
    same_prediction_pct_reason: str | None
    per_class_boxplots_original: list[BoxPlotStats]
    per_class_boxplots_shuffled: list[BoxPlotStats]
    per_class_boxplots_generic: list[BoxPlotStats]
    records: list[EvalRecord]
    generic_records: list[GenericRecord]
    manifest: object = None
    experiment: str = field(default="exp2", init=False)

    def boxplot_panels(self) -> list[tuple[str, list[BoxPlotStats]]]:
        return [
            ("original", self.per_class_boxplots_original),
            ("shuffled", self.per_class_boxplots_shuffled),
            ("generic", self.per_class_boxplots_generic),
        ]


def overall_accuracy(orig_pct: float, n_orig: int, shuf_pct: float, n_shuf: int) -> float:
    """Micro-averaged accuracy over the original and shuffled test sets."""
    correct = orig_pct / 100.0 * n_orig + shuf_pct / 100.0 * n_shuf
    return round(100.0 * correct / (n_orig + n_shuf), 2)


def make_shuffled_class(
    train: Sequence[Example], n: int, seed: int, new_label: str = SHUFFLED_LABEL
) -> list[Example]:
    """Original train set plus shuffled copies of n drawn samples.

    The n source samples are drawn uniformly without replacement across the
    whole train set (unstratified); each copy keeps its source's tokens as a
    multiset and carries ``new_label``.
    """
    if n > len(train):
        raise ValueError(f"cannot draw {n} samples from a train set of {len(train)}")
    augmented = list(train)
    if n == 0:
        return augmented
    order = shuffle_tokens(list(range(len(train))), substream(seed, "augment-draw:train"))
    chosen = [train[i] for i in sorted(order[:n])]
    augmented.extend(build_shuffled_set(chosen, seed, label_override=new_label))
    return augmented


def select_generic(
    corpus: Sequence[Example],
    bounds: LengthSummary,
    n: int,
    seed: int,
    exclude_ids: frozenset[str] | set[str] = frozenset(),
    stream: str = "generic-draw",
) -> list[Example]:
    """n uniform draws from corpus samples whose length falls in [q1, q3].

    Bounds are inclusive; excluded ids never qualify. Raises when the
    qualifying pool is smaller than n.
    """
    pool = [
        ex
        for ex in corpus
        if ex.id not in exclude_ids and bounds.q1 <= len(ex.tokens) <= bounds.q3
    ]
    if len(pool) < n:
        raise ValueError(
            f"need {n} generic samples but only {len(pool)} qualify "
            f"for length bounds [{bounds.q1:g}, {bounds.q3:g}]"
        )
    order = shuffle_tokens(list(range(len(pool))), substream(seed, stream))
    return [replace(pool[i], label=GENERIC_LABEL) for i in sorted(order[:n])]


def run_experiment1(model: Classifier, dataset: Dataset, seed: int) -> Exp1Report:
    """Shuffled-class augmentation: train with the extra class, test both ways.

    The shuffled test set consists of shuffled copies of the correctly
    classified test samples, and its gold label is the new class; overall
    accuracy micro-averages the original and shuffled test sets.
    """
    n = avg_class_size(dataset.train)
    augmented = make_shuffled_class(dataset.train, n, seed)
    labels = tuple(sorted(set(dataset.labels) | {SHUFFLED_LABEL}))
    model.fit(augmented, labels)

    records, original_preds, shuffled_preds = evaluate_pairs(model, dataset.test, seed)
    golds = [r.gold_label for r in records]
    orig_acc = accuracy(original_preds, golds)
    correct_preds = [r.original_pred for r in records if r.shuffled_pred is not None]

    n_test, n_shuf = len(records), len(shuffled_preds)
    if shuffled_preds:
        shuf_acc = accuracy(shuffled_preds, [SHUFFLED_LABEL] * n_shuf)
        shuf_reason = None
    else:
        shuf_acc, shuf_reason = None, NO_CORRECT_SAMPLES
    c_orig = sum(1 for r in records if r.original_pred.label == r.gold_label)
    c_shuf = sum(1 for p in shuffled_preds if p.label == SHUFFLED_LABEL)
    overall = round(100.0 * (c_orig + c_shuf) / (n_test + n_shuf), 2)

    return Exp1Report(
        dataset=dataset.name,
        model=model.descriptor(),
        seed=seed,
        n_augmented=n,
        original_test_accuracy=orig_acc,
        shuffled_test_accuracy=shuf_acc,
        shuffled_test_accuracy_reason=shuf_reason,
        overall_test_accuracy=overall,
        per_class_boxplots_original=per_class_boxplots(correct_preds),
        per_class_boxplots_shuffled=per_class_boxplots(shuffled_preds),
        records=records,
    )


def run_experiment2(
    model: Classifier, dataset: Dataset, generic_corpus: Sequence[Example], seed: int
) -> Exp2Report:
    """Generic-class augmentation: out-of-domain sentences as an extra class.

    Train-side generics are length-filtered by the train split's token-count
    IQR; test-side generics by the test split's IQR, drawn disjointly from
    the train-side picks and scored against the generic class.
    """
    n = avg_class_size(dataset.train)
    train_generics = select_generic(
        generic_corpus, length_iqr(dataset.train), n, seed, stream="generic-draw:train"
    )
    augmented = list(dataset.train) + train_generics
    labels = tuple(sorted(set(dataset.labels) | {GENERIC_LABEL}))
    model.fit(augmented, labels)

    records, original_preds, shuffled_preds = evaluate_pairs(model, dataset.test, seed)
    golds = [r.gold_label for r in records]
    pct = same_prediction_pct(records)
    correct_preds = [r.original_pred for r in records if r.shuffled_pred is not None]

    test_generics = select_generic(
        generic_corpus,
        length_iqr(dataset.test),
        n,
        seed,
        exclude_ids={ex.id for ex in train_generics},
        stream="generic-draw:test",
    )
    generic_preds = model.predict([ex.tokens for ex in test_generics])

    return Exp2Report(
        dataset=dataset.name,
        model=model.descriptor(),
        seed=seed,
        n_augmented=n,
        original_test_accuracy=accuracy(original_preds, golds),
        generic_sentence_accuracy=accuracy(generic_preds, [GENERIC_LABEL] * len(generic_preds)),
        same_prediction_pct=pct,
        same_prediction_pct_reason=None if pct is not None else NO_CORRECT_SAMPLES,
        per_class_boxplots_original=per_class_boxplots(correct_preds),
        per_class_boxplots_shuffled=per_class_boxplots(shuffled_preds),
        per_class_boxplots_generic=per_class_boxplots(generic_preds),
        records=records,
        generic_records=[GenericRecord(ex.id, p) for ex, p in zip(test_generics, generic_preds)],
    )
