"""The shuffle-and-re-evaluate procedure and its metrics.

The pipeline: fit on the train split, predict the test split, keep the
correctly classified samples, shuffle each of those once (frozen per seed),
predict the shuffled copies, and measure how often the label survives. The
probability a model assigns to its predicted class is also collected into
per-class box-plot statistics, which is where over-confidence on scrambled
input shows up.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Dataset, Example
from .models import Classifier, Prediction
from .shuffle import build_shuffled_set

NO_CORRECT_SAMPLES = "no test samples were classified correctly"


@dataclass(frozen=True)
class EvalRecord:
    """Paired original/shuffled predictions for one test sample.

    ``shuffled_pred`` is present exactly when the original prediction
    matched the gold label.
    """

    example_id: str
    gold_label: str
    original_pred: Prediction
    shuffled_pred: Prediction | None


@dataclass(frozen=True)
class BoxPlotStats:
    """Tukey box-plot statistics for one predicted class.

    Quartiles use linear interpolation at rank (n-1)*p; whiskers sit on the
    furthest data points within 1.5*IQR of the hinges (clamped to the hinges
    when no point falls in between); outliers are counted, not listed.
    """

    class_label: str
    n: int
    median: float
    q1: float
    q3: float
    lower_whisker: float
    upper_whisker: float
    n_outliers: int


@dataclass
class ShufTextReport:
    dataset: str
    model: dict
    seed: int
    original_test_accuracy: float
    same_prediction_pct: float | None
    same_prediction_pct_reason: str | None
    per_class_boxplots_original: list[BoxPlotStats]
    per_class_boxplots_shuffled: list[BoxPlotStats]
    records: list[EvalRecord]
    manifest: object = None
    experiment: str = field(default="shuftext", init=False)

    def boxplot_panels(self) -> list[tuple[str, list[BoxPlotStats]]]:
        return [
            ("original", self.per_class_boxplots_original),
            ("shuffled", self.per_class_boxplots_shuffled),
        ]


def accuracy(preds: Sequence[Prediction], golds: Sequence[str]) -> float:
    """Percent of predictions whose label matches gold, to 2 decimals."""
    if len(preds) != len(golds):
        raise ValueError(f"got {len(preds)} predictions for {len(golds)} gold labels")
    if not preds:
        raise ValueError("cannot compute accuracy of zero predictions")
    correct = sum(1 for pred, gold in zip(preds, golds) if pred.label == gold)
    return round(100.0 * correct / len(preds), 2)


def same_prediction_pct(records: Sequence[EvalRecord]) -> float | None:
    """Among records with a shuffled prediction, percent keeping the label.

    Returns None (undefined, never 0) when no record has a shuffled side.
    """
    eligible = [r for r in records if r.shuffled_pred is not None]
    if not eligible:
        return None
    same = sum(1 for r in eligible if r.shuffled_pred.label == r.original_pred.label)
    return round(100.0 * same / len(eligible), 2)


def boxplot_stats(values: Sequence[float], class_label: str) -> BoxPlotStats:
    """Box-plot statistics of probability values for one class."""
    if not values:
        raise ValueError(f"no probability values for class {class_label!r}")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"probability out of [0, 1] for class {class_label!r}: {v}")
    xs = sorted(values)
    if len(xs) == 1:
        q1 = med = q3 = xs[0]
    else:
        q1, med, q3 = statistics.quantiles(xs, n=4, method="inclusive")
    reach = 1.5 * (q3 - q1)
    lower = min(x for x in xs if x >= q1 - reach)
    if lower > q1:
        lower = q1
    upper = max(x for x in xs if x <= q3 + reach)
    if upper < q3:
        upper = q3
    n_outliers = sum(1 for x in xs if x < lower or x > upper)
    return BoxPlotStats(class_label, len(xs), med, q1, q3, lower, upper, n_outliers)


def per_class_boxplots(preds: Sequence[Prediction]) -> list[BoxPlotStats]:
    """Group predicted-class confidences by predicted label, one box per class."""
    groups: dict[str, list[float]] = {}
    for pred in preds:
        groups.setdefault(pred.label, []).append(pred.probs[pred.label])
    return [boxplot_stats(vals, lbl) for lbl, vals in sorted(groups.items())]


def evaluate_pairs(
    model: Classifier, test: Sequence[Example], seed: int
) -> tuple[list[EvalRecord], list[Prediction], list[Prediction]]:
    """Predict a test split, then predict shuffled copies of the correct ones.

    Returns (records sorted by example id, original predictions in that same
    order, shuffled predictions for the correct subset).
    """
    ordered = sorted(test, key=lambda ex: ex.id)
    original_preds = model.predict([ex.tokens for ex in ordered])
    correct = [ex for ex, pred in zip(ordered, original_preds) if pred.label == ex.label]
    shuffled_preds: list[Prediction] = []
    if correct:
        shuffled = build_shuffled_set(correct, seed)
        shuffled_preds = model.predict([ex.tokens for ex in shuffled])
    records = []
    by_id = {ex.id: pred for ex, pred in zip(correct, shuffled_preds)}
    for ex, pred in zip(ordered, original_preds):
        records.append(EvalRecord(ex.id, ex.label, pred, by_id.get(ex.id)))
    return records, original_preds, shuffled_preds


def run_shuftext(model: Classifier, dataset: Dataset, seed: int) -> ShufTextReport:
    """Full procedure: fit, predict, shuffle the correct samples, re-predict."""
    if not model.fitted:
        model.fit(dataset.train, dataset.labels)
    records, original_preds, shuffled_preds = evaluate_pairs(model, dataset.test, seed)
    golds = [r.gold_label for r in records]
    pct = same_prediction_pct(records)
    correct_preds = [r.original_pred for r in records if r.shuffled_pred is not None]
    return ShufTextReport(
        dataset=dataset.name,
        model=model.descriptor(),
        seed=seed,
        original_test_accuracy=accuracy(original_preds, golds),
        same_prediction_pct=pct,
        same_prediction_pct_reason=None if pct is not None else NO_CORRECT_SAMPLES,
        per_class_boxplots_original=per_class_boxplots(correct_preds),
        per_class_boxplots_shuffled=per_class_boxplots(shuffled_preds),
        records=records,
    )
