"""Synthetic-dataset builders shared across the test suite.

All randomness is drawn from the package's own seeded generator, so every
fixture is reproducible and the suite never touches global RNG state.
"""

from __future__ import annotations

from pathlib import Path

from shuftext.corpus import Dataset, Example
from shuftext.shuffle import shuffle_tokens, substream

KEYWORDS = {
    "art": ("canvas", "palette", "gallery", "sketch", "mural"),
    "food": ("recipe", "oven", "spice", "bakery", "stew"),
    "sport": ("league", "stadium", "referee", "goal", "trophy"),
}
FILLERS = (
    "the", "a", "this", "that", "very", "quite", "new", "old",
    "big", "small", "good", "fine", "plain", "still", "near", "far",
)


def keyword_example(split: str, lineno: int, label: str, rng) -> Example:
    """Sentence with two class keywords mixed into shared filler words."""
    words = list(KEYWORDS[label])
    keys = [words[rng.randbelow(len(words))] for _ in range(2)]
    n_fill = 3 + rng.randbelow(4)
    fill = [FILLERS[rng.randbelow(len(FILLERS))] for _ in range(n_fill)]
    tokens = tuple(shuffle_tokens(keys + fill, rng))
    return Example(f"{split}:{lineno}", " ".join(tokens), tokens, label)


def keyword_dataset(n_train: int = 120, n_test: int = 60, seed: int = 97) -> Dataset:
    """Multi-class corpus where class-exclusive keywords decide the label."""
    labels = tuple(sorted(KEYWORDS))

    def build(split: str, count: int) -> tuple[Example, ...]:
        rng = substream(seed, f"keyword-fixture:{split}")
        return tuple(
            keyword_example(split, i + 1, labels[i % len(labels)], rng)
            for i in range(count)
        )

    return Dataset("keyword-synthetic", labels, build("train", n_train), build("test", n_test))


def bigram_order_dataset(n_pairs_train: int = 300, n_pairs_test: int = 200, seed: int = 2024) -> Dataset:
    """Corpus where the class is decided solely by the order of one bigram.

    Each drawn filler set yields one "before" sentence containing "not good"
    and one mirrored "after" sentence containing "good not", so the two
    classes have exactly equal unigram counts: any bag-of-words model is
    blind to the distinction, while bigram features separate it perfectly.
    """
    fillers = [f"w{i:02d}" for i in range(20)]

    def build(split: str, n_pairs: int) -> tuple[Example, ...]:
        rng = substream(seed, f"bigram-fixture:{split}")
        examples = []
        lineno = 0
        for _ in range(n_pairs):
            idx = sorted(shuffle_tokens(list(range(len(fillers))), rng)[:6])
            picks = [fillers[i] for i in idx]
            for label, pair in (("after", ("good", "not")), ("before", ("not", "good"))):
                pos = rng.randbelow(len(picks) + 1)
                tokens = tuple(picks[:pos] + list(pair) + picks[pos:])
                lineno += 1
                examples.append(Example(f"{split}:{lineno}", " ".join(tokens), tokens, label))
        return tuple(examples)

    return Dataset(
        "bigram-order", ("after", "before"), build("train", n_pairs_train), build("test", n_pairs_test)
    )


def generic_examples(count: int, length: int, seed: int = 31) -> list[Example]:
    """Out-of-domain sentences over a vocabulary disjoint from the fixtures."""
    vocab = [f"zq{i:02d}" for i in range(30)]
    rng = substream(seed, f"generic-fixture:{length}")
    out = []
    for i in range(count):
        tokens = tuple(vocab[rng.randbelow(len(vocab))] for _ in range(length))
        out.append(Example(f"generic:{i + 1}", " ".join(tokens), tokens, "__generic__"))
    return out


def write_tsv(path: Path, rows: list[tuple[str, str]]) -> Path:
    path.write_text("".join(f"{label}\t{text}\n" for label, text in rows), encoding="utf-8")
    return path


TOY_TRAIN_ROWS = [
    ("pos", "a great fun movie"),
    ("pos", "great acting and fun"),
    ("pos", "truly great and moving work"),
    ("neg", "a bad boring movie"),
    ("neg", "boring plot and bad acting"),
    ("neg", "truly awful and dull work"),
]
TOY_TEST_ROWS = [
    ("pos", "great fun acting here"),
    ("neg", "bad boring plot here"),
    ("pos", "truly great movie work"),
    ("neg", "awful dull movie work"),
]
