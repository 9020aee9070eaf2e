"""Black-box tests for the example adapter.

The adapter is driven purely over its wire surface (a subprocess speaking
newline-delimited JSON), exactly as the evaluation harness would drive it;
nothing here imports the harness package.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

ADAPTER_PATH = Path(__file__).resolve().parents[1] / "example_adapter.py"

TOY_LABELS = ["blue", "red"]
TOY_TRAIN = [
    {"text": "crimson scarlet ruby", "label": "red"},
    {"text": "ruby garnet glow", "label": "red"},
    {"text": "azure cobalt sea", "label": "blue"},
    {"text": "cobalt sapphire sky", "label": "blue"},
]


class AdapterProcess:
    def __init__(self):
        self.proc = subprocess.Popen(
            [sys.executable, str(ADAPTER_PATH)],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def send_raw(self, line: str) -> dict:
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()
        response = self.proc.stdout.readline()
        assert response, "adapter closed its output stream"
        return json.loads(response)

    def request(self, payload: dict) -> dict:
        return self.send_raw(json.dumps(payload))

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            self.proc.wait(timeout=5)


@pytest.fixture
def adapter():
    proc = AdapterProcess()
    yield proc
    proc.close()


@pytest.fixture
def fitted(adapter):
    assert adapter.request({"op": "fit", "labels": TOY_LABELS, "train": TOY_TRAIN}) == {"op": "ok"}
    return adapter


def test_hello_reports_name_and_capability(adapter):
    assert adapter.request({"op": "hello"}) == {
        "op": "hello",
        "name": "example-adapter",
        "can_fit": True,
    }


def test_predict_before_fit_is_rejected_and_process_survives(adapter):
    response = adapter.request({"op": "predict", "id": 1, "texts": ["anything"]})
    assert response["op"] == "err"
    # still serving afterwards
    assert adapter.request({"op": "hello"})["op"] == "hello"


def test_fit_then_predict_memorizes_toy_data(fitted):
    response = fitted.request(
        {"op": "predict", "id": 2, "texts": [row["text"] for row in TOY_TRAIN]}
    )
    assert response["op"] == "predictions"
    labels = [p["label"] for p in response["predictions"]]
    assert labels == [row["label"] for row in TOY_TRAIN]


def test_predict_echoes_request_id(fitted):
    response = fitted.request({"op": "predict", "id": 31337, "texts": ["ruby sky"]})
    assert response["id"] == 31337


def test_probability_maps_are_simplex_over_all_labels(fitted):
    response = fitted.request(
        {"op": "predict", "id": 3, "texts": ["ruby glow", "unseen words here", ""]}
    )
    for pred in response["predictions"]:
        probs = pred["probs"]
        assert set(probs) == set(TOY_LABELS)
        assert all(0.0 <= p <= 1.0 for p in probs.values())
        assert abs(sum(probs.values()) - 1.0) <= 1e-6
        best = min(probs, key=lambda lbl: (-probs[lbl], lbl))
        assert pred["label"] == best


def test_empty_text_batch_gives_empty_predictions(fitted):
    response = fitted.request({"op": "predict", "id": 4, "texts": []})
    assert response == {"op": "predictions", "id": 4, "predictions": []}


def test_malformed_json_gets_err_and_loop_continues(fitted):
    response = fitted.send_raw("{this is not json")
    assert response["op"] == "err"
    assert "malformed" in response["msg"]
    follow_up = fitted.request({"op": "predict", "id": 5, "texts": ["ruby"]})
    assert follow_up["op"] == "predictions"


def test_unknown_op_gets_err(adapter):
    response = adapter.request({"op": "teleport"})
    assert response["op"] == "err"
    assert "unknown op" in response["msg"]


def test_predict_without_integer_id_gets_err(fitted):
    assert fitted.request({"op": "predict", "texts": ["x"]})["op"] == "err"
    assert fitted.request({"op": "predict", "id": "seven", "texts": ["x"]})["op"] == "err"


def test_fit_with_label_outside_set_gets_err(adapter):
    response = adapter.request(
        {"op": "fit", "labels": ["blue"], "train": [{"text": "ruby", "label": "red"}]}
    )
    assert response["op"] == "err"


def test_refit_replaces_the_model(fitted):
    flipped = [{"text": row["text"], "label": row["label"]} for row in TOY_TRAIN]
    assert fitted.request({"op": "fit", "labels": TOY_LABELS, "train": flipped}) == {"op": "ok"}
    response = fitted.request({"op": "predict", "id": 6, "texts": ["azure sea"]})
    assert response["predictions"][0]["label"] == "blue"


def test_passes_harness_protocol_check():
    """End-to-end conformance via the harness CLI, as adapter authors run it."""
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "shuftext.cli",
            "protocol-check",
            "--adapter",
            f"{sys.executable} {ADAPTER_PATH}",
        ],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0, result.stdout + result.stderr
    assert result.stdout.count("PASS") == 7
    assert "FAIL" not in result.stdout


def test_full_evaluation_run_through_harness(tmp_path):
    """The adapter can drive a complete harness run as an external model."""
    train = tmp_path / "train.tsv"
    train.write_text(
        "red\tcrimson scarlet ruby glow\n"
        "red\truby garnet crimson shine\n"
        "red\tscarlet garnet ruby tone\n"
        "blue\tazure cobalt sea mist\n"
        "blue\tcobalt sapphire sky haze\n"
        "blue\tazure sapphire sea foam\n"
    )
    test = tmp_path / "test.tsv"
    test.write_text(
        "red\tcrimson ruby light\n"
        "blue\tcobalt azure wave\n"
        "red\tgarnet scarlet shade\n"
        "blue\tsapphire cobalt tint\n"
    )
    result = subprocess.run(
        [
            sys.executable, "-m", "shuftext.cli", "run",
            "--train", str(train), "--test", str(test),
            "--model", "external", "--adapter", f"{sys.executable} {ADAPTER_PATH}",
            "--dataset-name", "colors", "--seed", "3",
            "--out", str(tmp_path / "out"),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0, result.stdout + result.stderr
    report = json.loads(
        (tmp_path / "out" / "shuftext" / "external_colors.report.json").read_text()
    )
    assert report["model"]["config"]["adapter_name"] == "example-adapter"
    assert report["original_test_accuracy"] == 100.0
    # the wrapped classifier is bag-of-tokens, so shuffling changes nothing
    assert report["same_prediction_pct"] == 100.0
