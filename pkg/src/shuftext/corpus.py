"""Loading, validation, and tokenization of labeled text datasets.

Datasets arrive as TSV (``label<TAB>text``) or JSONL (objects with ``text``
and ``label`` keys), one record per line, UTF-8. Everything loaded here is
immutable so downstream evaluation can fan out across threads freely.
"""

from __future__ import annotations

import json
import statistics
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

SHUFFLED_LABEL = "__shuffled__"
GENERIC_LABEL = "__generic__"
RESERVED_LABELS = frozenset({SHUFFLED_LABEL, GENERIC_LABEL})


class DatasetError(ValueError):
    """Raised for malformed, empty, or inconsistent dataset files."""


@dataclass(frozen=True)
class Example:
    """One labeled text sample with a stable id.

    ``tokens`` is always exactly ``tokenize(text)`` for examples built by the
    loaders in this module.
    """

    id: str
    text: str
    tokens: tuple[str, ...]
    label: str


@dataclass(frozen=True)
class Dataset:
    name: str
    labels: tuple[str, ...]
    train: tuple[Example, ...]
    test: tuple[Example, ...]


@dataclass(frozen=True)
class LengthSummary:
    """Interquartile bounds (in tokens) of a split's sentence lengths."""

    q1: float
    q3: float


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, and detach edge punctuation.

    Leading and trailing punctuation characters of each whitespace-separated
    chunk become single-character tokens; internal punctuation (hyphens,
    apostrophes) is kept. Never produces empty tokens, and re-tokenizing a
    space-joined token list gives the list back unchanged.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            end -= 1
        tokens.extend(chunk[:start])
        if start < end:
            tokens.append(chunk[start:end])
        tokens.extend(chunk[end:])
    return tokens


def _parse_tsv(path: Path, *, require_label: bool) -> list[tuple[int, str, str]]:
    records = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            label, sep, text = line.partition("\t")
            if not sep:
                raise DatasetError(f"{path}:{lineno}: expected 'label<TAB>text'")
            if require_label and not label:
                raise DatasetError(f"{path}:{lineno}: empty label")
            if not text:
                raise DatasetError(f"{path}:{lineno}: empty text")
            records.append((lineno, label, text))
    return records


def _parse_jsonl(path: Path, *, require_label: bool) -> list[tuple[int, str, str]]:
    records = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}:{lineno}: expected a JSON object")
            text = obj.get("text")
            label = obj.get("label", "")
            if not isinstance(text, str) or not text:
                raise DatasetError(f"{path}:{lineno}: missing or empty 'text'")
            if require_label and (not isinstance(label, str) or not label):
                raise DatasetError(f"{path}:{lineno}: missing or empty 'label'")
            records.append((lineno, str(label), text))
    return records


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".tsv":
        return "tsv"
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    raise DatasetError(f"{path}: cannot infer format from suffix; pass tsv or jsonl explicitly")


def _read_records(path: Path, fmt: str, *, require_label: bool) -> list[tuple[int, str, str]]:
    if fmt == "auto":
        fmt = detect_format(path)
    if fmt == "tsv":
        return _parse_tsv(path, require_label=require_label)
    if fmt == "jsonl":
        return _parse_jsonl(path, require_label=require_label)
    raise DatasetError(f"unknown dataset format {fmt!r}")


def load_split(path: str | Path, fmt: str, split: str) -> list[Example]:
    """Load one labeled split; ids are ``<split>:<line-number>``."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    examples = []
    for lineno, label, text in _read_records(path, fmt, require_label=True):
        if label in RESERVED_LABELS:
            raise DatasetError(f"{path}:{lineno}: label {label!r} is reserved for augmentation")
        examples.append(Example(f"{split}:{lineno}", text, tuple(tokenize(text)), label))
    if not examples:
        raise DatasetError(f"{path}: empty split")
    return examples


def load_dataset(
    train_path: str | Path,
    test_path: str | Path,
    fmt: str = "auto",
    name: str | None = None,
) -> Dataset:
    """Load train/test splits into a Dataset.

    The label set is the sorted union of labels observed in both splits.
    Loading the same files twice yields identical Datasets.
    """
    train = load_split(train_path, fmt, "train")
    test = load_split(test_path, fmt, "test")
    labels = tuple(sorted({ex.label for ex in train} | {ex.label for ex in test}))
    if name is None:
        name = Path(train_path).stem
    return Dataset(name=name, labels=labels, train=tuple(train), test=tuple(test))


def load_generic_corpus(path: str | Path, fmt: str = "auto") -> list[Example]:
    """Load an out-of-domain corpus; any label field is ignored.

    Every example carries the reserved ``__generic__`` label and an id of the
    form ``generic:<line-number>``.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"{path}: no such file")
    examples = []
    for lineno, _label, text in _read_records(path, fmt, require_label=False):
        examples.append(Example(f"generic:{lineno}", text, tuple(tokenize(text)), GENERIC_LABEL))
    if not examples:
        raise DatasetError(f"{path}: empty corpus")
    return examples


def avg_class_size(split: Sequence[Example]) -> int:
    """Floor of (split size / number of distinct labels in the split)."""
    if not split:
        raise DatasetError("cannot compute class size of an empty split")
    return len(split) // len({ex.label for ex in split})


def length_iqr(split: Sequence[Example]) -> LengthSummary:
    """25th/75th percentiles of token counts, linear interpolation at (n-1)*p."""
    if not split:
        raise DatasetError("cannot compute length quartiles of an empty split")
    lengths = sorted(len(ex.tokens) for ex in split)
    if len(lengths) == 1:
        return LengthSummary(float(lengths[0]), float(lengths[0]))
    q1, _, q3 = statistics.quantiles(lengths, n=4, method="inclusive")
    return LengthSummary(q1, q3)
