#!/usr/bin/env python3
"""Example classifier adapter.

Serves the shuftext wire protocol on stdin/stdout: one JSON object per line,
ops ``hello`` / ``fit`` / ``predict``. Malformed requests get an ``err``
response and the loop keeps serving; predict responses echo the request id
and carry a full probability map per text.

The bundled classifier is a tiny smoothed token-count scorer so the example
runs with zero dependencies. To wrap a real model (a fine-tuned transformer,
an RNN, anything), replace ``BagOfTokens`` with a class exposing the same
two methods and leave the protocol handling untouched.
"""

import json
import math
import sys

ADAPTER_NAME = "example-adapter"


class BagOfTokens:
    """Per-class token frequencies with add-one smoothing.

    Extension point: a replacement needs ``train(labels, rows)`` where rows
    are ``{"text": str, "label": str}`` mappings, and ``probabilities(text)``
    returning ``{label: float}`` over all trained labels, summing to 1.
    """

    def __init__(self):
        self.labels = []
        self.class_counts = {}
        self.token_counts = {}
        self.token_totals = {}
        self.vocab = set()

    def train(self, labels, rows):
        self.labels = sorted(labels)
        self.class_counts = {label: 0 for label in self.labels}
        self.token_counts = {label: {} for label in self.labels}
        for row in rows:
            label = row["label"]
            if label not in self.class_counts:
                raise ValueError(f"label {label!r} is not in the label set")
            self.class_counts[label] += 1
            counts = self.token_counts[label]
            for token in str(row["text"]).lower().split():
                counts[token] = counts.get(token, 0) + 1
                self.vocab.add(token)
        self.token_totals = {label: sum(c.values()) for label, c in self.token_counts.items()}

    def probabilities(self, text):
        total_rows = sum(self.class_counts.values())
        log_scores = {}
        for label in self.labels:
            score = math.log((self.class_counts[label] + 1) / (total_rows + len(self.labels)))
            seen = self.token_counts[label]
            denom = self.token_totals[label] + len(self.vocab) + 1
            for token in text.lower().split():
                score += math.log((seen.get(token, 0) + 1) / denom)
            log_scores[label] = score
        peak = max(log_scores.values())
        weights = {label: math.exp(log_scores[label] - peak) for label in self.labels}
        norm = sum(weights.values())
        return {label: weight / norm for label, weight in weights.items()}


def handle(message, state):
    """One response object per request object."""
    op = message.get("op")
    if op == "hello":
        return {"op": "hello", "name": ADAPTER_NAME, "can_fit": True}

    if op == "fit":
        labels = message.get("labels")
        rows = message.get("train")
        if not isinstance(labels, list) or not labels:
            return {"op": "err", "msg": "fit needs a non-empty 'labels' list"}
        if not isinstance(rows, list) or not rows:
            return {"op": "err", "msg": "fit needs a non-empty 'train' list"}
        model = BagOfTokens()
        try:
            model.train(labels, rows)
        except (KeyError, TypeError, ValueError) as exc:
            return {"op": "err", "msg": f"cannot train: {exc}"}
        state["model"] = model
        return {"op": "ok"}

    if op == "predict":
        request_id = message.get("id")
        if not isinstance(request_id, int) or isinstance(request_id, bool):
            return {"op": "err", "msg": "predict needs an integer 'id'"}
        model = state.get("model")
        if model is None:
            return {"op": "err", "msg": "predict before fit"}
        texts = message.get("texts")
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return {"op": "err", "msg": "predict needs a 'texts' list of strings"}
        predictions = []
        for text in texts:
            probs = model.probabilities(text)
            label = min(probs, key=lambda lbl: (-probs[lbl], lbl))
            predictions.append({"label": label, "probs": probs})
        return {"op": "predictions", "id": request_id, "predictions": predictions}

    return {"op": "err", "msg": f"unknown op {op!r}"}


def serve(stdin=sys.stdin, stdout=sys.stdout):
    """Answer requests until the input stream closes."""
    state = {}
    for line in stdin:
        if not line.strip():
            continue
        try:
            message = json.loads(line)
            if not isinstance(message, dict):
                raise ValueError("request is not a JSON object")
        except ValueError as exc:
            response = {"op": "err", "msg": f"malformed request: {exc}"}
        else:
            response = handle(message, state)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


if __name__ == "__main__":
    serve()
