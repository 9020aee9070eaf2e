"""Built-in reference classifiers behind a uniform fit/predict surface.

Two deliberately simple models ship with the toolkit:

* ``NaiveBayes`` scores token multisets only, so its predictions are exactly
  invariant under any reordering of a sentence. That makes it a fixture for
  the maximally keyword-reliant end of the spectrum.
* ``NgramLogisticRegression`` adds adjacent-pair (bigram) presence features,
  giving it a minimal word-order signal to contrast against.

Anything heavier attaches as an external adapter process (see ``adapter``).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Protocol, Sequence

from .corpus import Example
from .shuffle import SplitMix64, shuffle_tokens

SIMPLEX_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Prediction:
    """Predicted label plus the full probability distribution over labels."""

    label: str
    probs: dict[str, float]


def argmax_label(probs: dict[str, float]) -> str:
    """Highest-probability label; ties go to the lexicographically smallest."""
    return min(probs, key=lambda lbl: (-probs[lbl], lbl))


def prediction_from_scores(scores: dict[str, float]) -> Prediction:
    """Normalize log-space scores onto the probability simplex."""
    peak = max(scores.values())
    weights = {lbl: math.exp(scores[lbl] - peak) for lbl in sorted(scores)}
    total = sum(weights.values())
    probs = {lbl: w / total for lbl, w in weights.items()}
    return Prediction(argmax_label(probs), probs)


def validate_prediction(pred: Prediction, labels: Sequence[str]) -> None:
    """Check the simplex and argmax/tie-break invariants; raise on violation."""
    missing = set(labels) - set(pred.probs)
    if missing:
        raise ValueError(f"prediction missing probabilities for labels {sorted(missing)}")
    for lbl, p in pred.probs.items():
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability for {lbl!r} out of [0, 1]: {p}")
    total = sum(pred.probs[lbl] for lbl in sorted(pred.probs))
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise ValueError(f"probabilities sum to {total}, not 1")
    expected = argmax_label(pred.probs)
    if pred.label != expected:
        raise ValueError(f"label {pred.label!r} is not the tie-broken argmax {expected!r}")


class Classifier(Protocol):
    """What eval pipelines expect from a model."""

    kind: str
    fitted: bool

    def fit(self, train: Sequence[Example], labels: Sequence[str]) -> "Classifier": ...

    def predict(self, token_lists: Sequence[Sequence[str]]) -> list[Prediction]: ...

    def descriptor(self) -> dict: ...


def _check_fit_inputs(train: Sequence[Example], labels: Sequence[str]) -> tuple[str, ...]:
    if not train:
        raise ValueError("cannot fit on an empty train set")
    if not labels:
        raise ValueError("cannot fit with an empty label set")
    label_set = tuple(sorted(set(labels)))
    outside = {ex.label for ex in train} - set(label_set)
    if outside:
        raise ValueError(f"train labels {sorted(outside)} are outside the label set")
    return label_set


class NaiveBayes:
    """Multinomial Naive Bayes over unigram counts, Laplace smoothing alpha=1.

    Class priors come from label frequencies; tokens never seen in training
    contribute only the smoothing mass. Scores are accumulated over the
    sorted token multiset, so a sentence and any permutation of it produce
    bit-identical probability maps.
    """

    kind = "builtin-nb"

    def __init__(self) -> None:
        self.fitted = False
        self.labels: tuple[str, ...] = ()
        self._log_prior: dict[str, float] = {}
        self._counts: dict[str, Counter[str]] = {}
        self._totals: dict[str, int] = {}
        self._vocab_size = 0

    def descriptor(self) -> dict:
        return {"kind": self.kind, "config": {"alpha": 1}}

    def fit(self, train: Sequence[Example], labels: Sequence[str]) -> "NaiveBayes":
        self.labels = _check_fit_inputs(train, labels)
        class_sizes = Counter(ex.label for ex in train)
        self._counts = {lbl: Counter() for lbl in self.labels}
        for ex in train:
            self._counts[ex.label].update(ex.tokens)
        self._totals = {lbl: sum(self._counts[lbl].values()) for lbl in self.labels}
        self._vocab_size = len({tok for c in self._counts.values() for tok in c})
        self._log_prior = {
            lbl: math.log(class_sizes[lbl] / len(train)) if class_sizes[lbl] else -math.inf
            for lbl in self.labels
        }
        self.fitted = True
        return self

    def predict(self, token_lists: Sequence[Sequence[str]]) -> list[Prediction]:
        if not self.fitted:
            raise RuntimeError("predict called before fit")
        return [self._predict_one(tokens) for tokens in token_lists]

    def _predict_one(self, tokens: Sequence[str]) -> Prediction:
        counts = Counter(tokens)
        scores = {}
        for lbl in self.labels:
            seen = self._counts[lbl]
            # the floor guards the degenerate all-empty-sentence train set
            denom = max(self._totals[lbl] + self._vocab_size, 1)
            score = self._log_prior[lbl]
            for tok in sorted(counts):
                score += counts[tok] * math.log((seen[tok] + 1) / denom)
            scores[lbl] = score
        return prediction_from_scores(scores)


class NgramLogisticRegression:
    """Multinomial logistic regression over unigram+bigram presence features.

    Trained with plain SGD: a fixed number of epochs, a fixed learning rate,
    weights initialized to zero, and the example order reshuffled each epoch
    by the model's own config seed. Fully deterministic for a given
    (train set, config).
    """

    kind = "builtin-ngram-lr"

    def __init__(self, epochs: int = 20, learning_rate: float = 0.1, seed: int = 0) -> None:
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.fitted = False
        self.labels: tuple[str, ...] = ()
        self._weights: dict[str, dict[str, float]] = {}
        self._bias: dict[str, float] = {}

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "config": {
                "epochs": self.epochs,
                "learning_rate": self.learning_rate,
                "seed": self.seed,
            },
        }

    @staticmethod
    def features(tokens: Sequence[str]) -> list[str]:
        """Sorted presence features: each token, plus each adjacent pair."""
        feats = set(tokens)
        feats.update(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
        return sorted(feats)

    def fit(self, train: Sequence[Example], labels: Sequence[str]) -> "NgramLogisticRegression":
        self.labels = _check_fit_inputs(train, labels)
        self._weights = {lbl: {} for lbl in self.labels}
        self._bias = {lbl: 0.0 for lbl in self.labels}
        prepared = [(self.features(ex.tokens), ex.label) for ex in train]
        rng = SplitMix64(self.seed)
        order = list(range(len(prepared)))
        for _ in range(self.epochs):
            order = shuffle_tokens(order, rng)
            for idx in order:
                feats, gold = prepared[idx]
                probs = prediction_from_scores(self._scores(feats)).probs
                for lbl in self.labels:
                    step = self.learning_rate * (probs[lbl] - (1.0 if lbl == gold else 0.0))
                    self._bias[lbl] -= step
                    weights = self._weights[lbl]
                    for feat in feats:
                        weights[feat] = weights.get(feat, 0.0) - step
        self.fitted = True
        return self

    def _scores(self, feats: Sequence[str]) -> dict[str, float]:
        scores = {}
        for lbl in self.labels:
            weights = self._weights[lbl]
            total = self._bias[lbl]
            for feat in feats:
                total += weights.get(feat, 0.0)
            scores[lbl] = total
        return scores

    def predict(self, token_lists: Sequence[Sequence[str]]) -> list[Prediction]:
        if not self.fitted:
            raise RuntimeError("predict called before fit")
        return [
            prediction_from_scores(self._scores(self.features(tokens)))
            for tokens in token_lists
        ]


BUILTIN_MODELS = {
    NaiveBayes.kind: NaiveBayes,
    NgramLogisticRegression.kind: NgramLogisticRegression,
}


def make_builtin(kind: str, **config) -> Classifier:
    try:
        factory = BUILTIN_MODELS[kind]
    except KeyError:
        raise ValueError(f"unknown builtin model {kind!r}") from None
    return factory(**config)
