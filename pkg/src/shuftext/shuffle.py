"""Deterministic, seeded shuffling of token sequences.

Randomness comes from SplitMix64, a tiny 64-bit generator that is trivial to
reimplement in any language and has published reference outputs (see the
README for test vectors). Each example gets its own substream keyed by
(seed, example id), so shuffling is independent of iteration order and safe
to parallelize.
"""

from __future__ import annotations

import hashlib
from dataclasses import replace
from typing import Sequence, TypeVar

from .corpus import Example

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 pseudo-random generator (64-bit state, 64-bit output)."""

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        x = self.state
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
        return x ^ (x >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), bias-free via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound


def substream(seed: int, key: str) -> SplitMix64:
    """Independent generator derived from (seed, key).

    The substream seed is the first 8 bytes (big-endian) of
    SHA-256("<seed>:<key>"), which keeps draws for one example stable no
    matter how the dataset is ordered or partitioned.
    """
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).digest()
    return SplitMix64(int.from_bytes(digest[:8], "big"))


def shuffle_tokens(tokens: Sequence[T], rng: SplitMix64) -> list[T]:
    """Uniformly random permutation of ``tokens`` (Fisher-Yates).

    Identity permutations are allowed; length-0/1 inputs come back unchanged.
    """
    out = list(tokens)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randbelow(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def build_shuffled_set(
    examples: Sequence[Example],
    seed: int,
    label_override: str | None = None,
) -> list[Example]:
    """Shuffled copy of each example, id-suffixed with ``#shuf``.

    Labels are preserved unless ``label_override`` is given. The per-example
    substream makes the output independent of the order of ``examples``.
    """
    if not examples:
        raise ValueError("cannot build a shuffled set from zero examples")
    out = []
    for ex in examples:
        tokens = tuple(shuffle_tokens(ex.tokens, substream(seed, ex.id)))
        out.append(
            replace(
                ex,
                id=f"{ex.id}#shuf",
                text=" ".join(tokens),
                tokens=tokens,
                label=ex.label if label_override is None else label_override,
            )
        )
    return out
