"""Client for external classifier adapters.

An adapter is any process that answers newline-delimited JSON requests on
its standard input/output:

* ``{"op": "hello"}`` -> ``{"op": "hello", "name": str, "can_fit": bool}``
* ``{"op": "fit", "labels": [...], "train": [{"text", "label"}, ...]}``
  -> ``{"op": "ok"}`` or ``{"op": "err", "msg": str}``
* ``{"op": "predict", "id": int, "texts": [str, ...]}``
  -> ``{"op": "predictions", "id": int, "predictions": [...]}``

Predict responses must echo the request id and emit one probability map per
text, covering every label and summing to 1 within 1e-6. The client keeps
exactly one request in flight per adapter process.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import threading
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .corpus import Example
from .models import Prediction, validate_prediction

DEFAULT_TIMEOUT_SECS = 120.0
DEFAULT_BATCH_SIZE = 64
TIMEOUT_ENV_VAR = "SHUFTEXT_ADAPTER_TIMEOUT_SECS"


class AdapterError(RuntimeError):
    """Adapter process failed, timed out, or broke the wire protocol."""


def _resolve_timeout(timeout: float | None) -> float:
    if timeout is not None:
        return timeout
    raw = os.environ.get(TIMEOUT_ENV_VAR, "")
    if raw:
        try:
            return float(raw)
        except ValueError as exc:
            raise AdapterError(f"{TIMEOUT_ENV_VAR} is not a number: {raw!r}") from exc
    return DEFAULT_TIMEOUT_SECS


class AdapterClient:
    """Owns one adapter subprocess and its line-oriented request loop."""

    def __init__(self, command: str, timeout: float | None = None) -> None:
        self.command = command
        self.timeout = _resolve_timeout(timeout)
        self._lock = threading.Lock()
        self._stderr_tail: deque[str] = deque(maxlen=40)
        self._lines: queue.Queue[str | None] = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(f"cannot start adapter {command!r}: {exc}") from exc
        threading.Thread(target=self._drain_stdout, daemon=True).start()
        threading.Thread(target=self._drain_stderr, daemon=True).start()
        hello = self.roundtrip({"op": "hello"})
        if hello.get("op") != "hello" or not isinstance(hello.get("name"), str):
            raise AdapterError(f"bad hello response: {hello!r}")
        if not isinstance(hello.get("can_fit"), bool):
            raise AdapterError(f"hello response missing boolean can_fit: {hello!r}")
        self.name: str = hello["name"]
        self.can_fit: bool = hello["can_fit"]

    def _drain_stdout(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _drain_stderr(self) -> None:
        assert self._proc.stderr is not None
        for line in self._proc.stderr:
            self._stderr_tail.append(line.rstrip("\n"))

    def stderr_excerpt(self) -> str:
        return "\n".join(self._stderr_tail) or "<no stderr output>"

    def send_line(self, text: str) -> None:
        assert self._proc.stdin is not None
        try:
            self._proc.stdin.write(text + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterError(
                f"adapter {self.command!r} closed its input; stderr:\n{self.stderr_excerpt()}"
            ) from exc

    def read_response(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise AdapterError(
                f"adapter {self.command!r} timed out after {self.timeout:g}s; "
                f"stderr:\n{self.stderr_excerpt()}"
            ) from None
        if line is None:
            raise AdapterError(
                f"adapter {self.command!r} exited unexpectedly; stderr:\n{self.stderr_excerpt()}"
            )
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterError(f"adapter sent invalid JSON: {line!r}") from exc
        if not isinstance(obj, dict):
            raise AdapterError(f"adapter sent a non-object response: {obj!r}")
        return obj

    def roundtrip(self, payload: dict) -> dict:
        """Send one request and wait for exactly one response."""
        with self._lock:
            self.send_line(json.dumps(payload))
            return self.read_response()

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.wait(timeout=2)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()
        for stream in (self._proc.stdin, self._proc.stdout, self._proc.stderr):
            try:
                if stream is not None:
                    stream.close()
            except OSError:
                pass

    def __enter__(self) -> "AdapterClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class ExternalAdapterModel:
    """Classifier backed by an adapter process.

    Adapters that report ``can_fit: false`` are treated as pre-fitted;
    calling ``fit`` on them is an error, so they can run the plain shuffle
    evaluation but not the augmentation experiments.
    """

    kind = "external"

    def __init__(
        self,
        command: str,
        timeout: float | None = None,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ) -> None:
        if batch_size < 1:
            raise ValueError("batch size must be at least 1")
        self.batch_size = batch_size
        self.client = AdapterClient(command, timeout=timeout)
        self.fitted = not self.client.can_fit
        self.labels: tuple[str, ...] = ()
        self._next_id = 0

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "config": {
                "command": self.client.command,
                "adapter_name": self.client.name,
                "batch_size": self.batch_size,
            },
        }

    def close(self) -> None:
        self.client.close()

    def fit(self, train: Sequence[Example], labels: Sequence[str]) -> "ExternalAdapterModel":
        if not self.client.can_fit:
            raise AdapterError(f"adapter {self.client.name!r} does not support fit")
        if not train:
            raise ValueError("cannot fit on an empty train set")
        self.labels = tuple(sorted(set(labels)))
        response = self.client.roundtrip(
            {
                "op": "fit",
                "labels": list(self.labels),
                "train": [{"text": " ".join(ex.tokens), "label": ex.label} for ex in train],
            }
        )
        if response.get("op") == "err":
            raise AdapterError(f"adapter rejected fit: {response.get('msg', '<no message>')}")
        if response.get("op") != "ok":
            raise AdapterError(f"bad fit response: {response!r}")
        self.fitted = True
        return self

    def predict(self, token_lists: Sequence[Sequence[str]]) -> list[Prediction]:
        if not self.fitted:
            raise RuntimeError("predict called before fit")
        predictions: list[Prediction] = []
        for start in range(0, len(token_lists), self.batch_size):
            batch = token_lists[start : start + self.batch_size]
            predictions.extend(self._predict_batch(batch))
        return predictions

    def _predict_batch(self, batch: Sequence[Sequence[str]]) -> list[Prediction]:
        self._next_id += 1
        request_id = self._next_id
        response = self.client.roundtrip(
            {
                "op": "predict",
                "id": request_id,
                "texts": [" ".join(tokens) for tokens in batch],
            }
        )
        if response.get("op") == "err":
            raise AdapterError(f"adapter rejected predict: {response.get('msg', '<no message>')}")
        if response.get("op") != "predictions":
            raise AdapterError(f"bad predict response: {response!r}")
        if response.get("id") != request_id:
            raise AdapterError(
                f"response id {response.get('id')!r} does not echo request id {request_id}"
            )
        rows = response.get("predictions")
        if not isinstance(rows, list) or len(rows) != len(batch):
            got = len(rows) if isinstance(rows, list) else type(rows).__name__
            raise AdapterError(
                f"predict response {request_id} has {got} predictions for {len(batch)} texts"
            )
        return [self._parse_prediction(row, request_id, i) for i, row in enumerate(rows)]

    def _parse_prediction(self, row: object, request_id: int, index: int) -> Prediction:
        where = f"response {request_id}, prediction {index}"
        if not isinstance(row, dict):
            raise AdapterError(f"{where}: expected an object, got {row!r}")
        probs = row.get("probs")
        if not isinstance(probs, dict):
            raise AdapterError(f"{where}: missing probability map")
        clean: dict[str, float] = {}
        for lbl in sorted(probs):
            value = probs[lbl]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise AdapterError(f"{where}: probability of {lbl!r} is not a number")
            clean[str(lbl)] = float(value)
        pred = Prediction(str(row.get("label")), clean)
        try:
            validate_prediction(pred, self.labels or tuple(clean))
        except ValueError as exc:
            raise AdapterError(f"{where}: {exc}") from exc
        return pred


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


_TOY_LABELS = ("down", "up")
_TOY_TRAIN = [
    {"text": "stocks rallied sharply today", "label": "up"},
    {"text": "markets climbed on strong earnings", "label": "up"},
    {"text": "shares tumbled after the report", "label": "down"},
    {"text": "prices fell in heavy trading", "label": "down"},
]


def _validated_rows(rows: list, labels: Sequence[str]) -> str | None:
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or not isinstance(row.get("probs"), dict):
            return f"prediction {i} is missing a probability map"
        try:
            probs = {str(k): float(v) for k, v in row["probs"].items()}
            validate_prediction(Prediction(str(row.get("label")), probs), labels)
        except (ValueError, TypeError) as exc:
            return f"prediction {i}: {exc}"
    return None


def run_protocol_check(command: str, timeout: float | None = None) -> list[CheckResult]:
    """Replay the wire-protocol contract against an adapter command.

    Returns one result per named check; the adapter conforms when every
    result passes. Designed to run without any dataset on hand.
    """
    results: list[CheckResult] = []

    def record(name: str, passed: bool, detail: str) -> bool:
        results.append(CheckResult(name, passed, detail))
        return passed

    stage = "hello"
    try:
        client = AdapterClient(command, timeout=timeout)
    except AdapterError as exc:
        record(stage, False, str(exc))
        return results
    try:
        with client:
            record("hello", True, f"name={client.name!r} can_fit={client.can_fit}")

            if client.can_fit:
                stage = "predict-before-fit"
                response = client.roundtrip({"op": "predict", "id": 1, "texts": ["too early"]})
                record(
                    stage,
                    response.get("op") == "err",
                    f"expected err before fit, got {response.get('op')!r}",
                )
                stage = "fit"
                response = client.roundtrip(
                    {"op": "fit", "labels": list(_TOY_LABELS), "train": _TOY_TRAIN}
                )
                if not record(stage, response.get("op") == "ok", f"got {response!r}"):
                    return results
            else:
                record("predict-before-fit", True, "skipped: adapter is pre-fitted")
                record("fit", True, "skipped: adapter reports can_fit=false")

            stage = "predict"
            texts = ["stocks rallied sharply today", "prices fell in heavy trading"]
            response = client.roundtrip({"op": "predict", "id": 2, "texts": texts})
            rows = response.get("predictions")
            predict_ok = (
                response.get("op") == "predictions"
                and isinstance(rows, list)
                and len(rows) == len(texts)
            )
            if not record(stage, predict_ok, f"got {response!r}"):
                return results

            stage = "malformed-request-recovery"
            client.send_line("this is not json")
            garbled = client.read_response()
            recovered = client.roundtrip({"op": "no-such-op"})
            alive = client.roundtrip({"op": "predict", "id": 3, "texts": ["still serving"]})
            record(
                stage,
                garbled.get("op") == "err"
                and recovered.get("op") == "err"
                and alive.get("op") == "predictions",
                f"garbled->{garbled.get('op')!r} unknown->{recovered.get('op')!r} "
                f"then predict->{alive.get('op')!r}",
            )

            stage = "id-echo"
            marker = 987654321
            echoed = client.roundtrip({"op": "predict", "id": marker, "texts": ["echo test"]})
            record(
                stage,
                echoed.get("op") == "predictions" and echoed.get("id") == marker,
                f"sent id {marker}, got {echoed.get('id')!r}",
            )

            stage = "simplex-validity"
            problem = _validated_rows(rows, _TOY_LABELS if client.can_fit else tuple())
            record(stage, problem is None, problem or "all probability maps valid")
    except AdapterError as exc:
        record(stage, False, str(exc))
    return results
