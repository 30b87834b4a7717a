"""Vocabulary construction, subword n-gram hashing, and sampling tables."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError
from .ingest import CleanTweet

FNV_OFFSET_BASIS = 2166136261
FNV_PRIME = 16777619

DEFAULT_MIN_COUNT = 5
DEFAULT_SUBSAMPLE_T = 1e-4
NEG_TABLE_SIZE = 10_000_000
NEG_POWER = 0.75

VOCAB_HEADER_TAG = "#vocab v1"


def fnv1a_32(data: bytes) -> int:
    """32-bit FNV-1a hash."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & 0xFFFFFFFF
    return h


@dataclass(frozen=True)
class SubwordConfig:
    minn: int = 3
    maxn: int = 6
    bucket: int = 2_000_000

    def __post_init__(self):
        if not (0 < self.minn <= self.maxn):
            raise ValueError(f"need 0 < minn <= maxn, got minn={self.minn} maxn={self.maxn}")
        if self.bucket < 1:
            raise ValueError(f"bucket must be >= 1, got {self.bucket}")


def subword_ngrams(token: str, cfg: SubwordConfig) -> set[int]:
    """Hashed bucket ids of the character n-grams of '<token>'.

    Every contiguous n-gram of the boundary-wrapped token with length in
    [minn, maxn] contributes, except the wrapped token itself. Duplicate
    bucket ids collapse.
    """
    if not token:
        raise ValueError("token must be nonempty")
    wrapped = f"<{token}>"
    n = len(wrapped)
    ids: set[int] = set()
    for size in range(cfg.minn, min(cfg.maxn, n) + 1):
        if size == n:
            continue
        for start in range(n - size + 1):
            gram = wrapped[start : start + size]
            ids.add(fnv1a_32(gram.encode("utf-8")) % cfg.bucket)
    return ids


@dataclass
class Vocabulary:
    """Token table sorted by descending count (ties lexicographic).

    ``total_tokens`` counts every token seen in the corpus, including
    occurrences of tokens later pruned by ``min_count``; subsampling
    frequencies are relative to it.
    """

    tokens: list[str]
    counts: np.ndarray  # int64, aligned with tokens
    total_tokens: int
    min_count: int
    subsample_t: float = DEFAULT_SUBSAMPLE_T

    def __len__(self) -> int:
        return len(self.tokens)

    @cached_property
    def token2id(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.tokens)}

    def discard_probs(self, t: float) -> np.ndarray:
        """Per-id probability of dropping a token during subsampling.

        t <= 0 disables subsampling entirely."""
        if t <= 0:
            return np.zeros(len(self))
        freq = self.counts / self.total_tokens
        return np.maximum(0.0, 1.0 - np.sqrt(t / freq))

    @cached_property
    def discard_prob(self) -> np.ndarray:
        return self.discard_probs(self.subsample_t)

    def neg_table(self, size: int | None = None) -> np.ndarray:
        """Negative-sampling table: uniform draws from it realize the
        count^0.75 unigram distribution.

        Slot counts come from rounded cumulative shares, so the table is
        filled exactly and every prefix is proportional to within one slot.
        """
        if size is None:
            size = max(len(self), NEG_TABLE_SIZE)
        if size < len(self):
            raise ValueError(f"table size {size} < vocabulary size {len(self)}")
        weights = np.power(self.counts.astype(np.float64), NEG_POWER)
        edges = np.rint(np.cumsum(weights) / weights.sum() * size).astype(np.int64)
        slots = np.diff(edges, prepend=0)
        return np.repeat(np.arange(len(self), dtype=np.int32), slots)

    def hashtag_ids(self) -> list[int]:
        return [i for i, tok in enumerate(self.tokens) if tok.startswith("#")]

    # --- serialization (UTF-8 TSV) ---

    def to_tsv_bytes(self) -> bytes:
        lines = [f"{VOCAB_HEADER_TAG} {len(self)} {self.total_tokens} {self.min_count}"]
        lines.extend(f"{tok}\t{int(c)}" for tok, c in zip(self.tokens, self.counts))
        return ("\n".join(lines) + "\n").encode("utf-8")

    @classmethod
    def from_tsv_bytes(cls, data: bytes) -> "Vocabulary":
        lines = data.decode("utf-8").splitlines()
        if not lines or not lines[0].startswith(VOCAB_HEADER_TAG):
            raise DataError("vocabulary block missing '#vocab v1' header")
        try:
            _, _, v, total, min_count = lines[0].split()
            v, total, min_count = int(v), int(total), int(min_count)
        except ValueError as exc:
            raise DataError(f"bad vocabulary header: {lines[0]!r}") from exc
        if len(lines) - 1 != v:
            raise DataError(f"vocabulary header claims {v} tokens, found {len(lines) - 1}")
        tokens: list[str] = []
        counts = np.empty(v, dtype=np.int64)
        for i, line in enumerate(lines[1:]):
            try:
                tok, cnt = line.split("\t")
                counts[i] = int(cnt)
            except ValueError as exc:
                raise DataError(f"bad vocabulary line {i + 2}: {line!r}") from exc
            tokens.append(tok)
        return cls(tokens=tokens, counts=counts, total_tokens=total, min_count=min_count)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_tsv_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        return cls.from_tsv_bytes(Path(path).read_bytes())


def build_vocab(
    corpus: Iterable[CleanTweet],
    min_count: int = DEFAULT_MIN_COUNT,
    subsample_t: float = DEFAULT_SUBSAMPLE_T,
) -> Vocabulary:
    """Count tokens over the whole stream and keep those with count >= min_count.

    Ids are assigned by descending count with lexicographic tie-break, so
    the same corpus always yields the same table.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    if not (0 <= subsample_t <= 1):
        raise ValueError(f"subsample_t must be in [0, 1] (0 disables), got {subsample_t}")
    counter: Counter[str] = Counter()
    for tweet in corpus:
        counter.update(tweet)
    total = sum(counter.values())
    kept = sorted(
        ((tok, c) for tok, c in counter.items() if c >= min_count),
        key=lambda item: (-item[1], item[0]),
    )
    if not kept:
        raise DataError("empty vocabulary: no token reached min_count "
                        f"({min_count}) in {total} corpus tokens")
    tokens = [tok for tok, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(
        tokens=tokens,
        counts=counts,
        total_tokens=total,
        min_count=min_count,
        subsample_t=subsample_t,
    )


def draw_negative(table: np.ndarray, rng: np.random.Generator) -> int:
    """One negative-context draw: a uniform index into the table."""
    return int(table[rng.integers(table.shape[0])])
