"""Tweet corpus ingestion: streaming reader, text normalization, hashtag extraction.

Input is newline-delimited JSON (one tweet object per line, plain or gzip).
Only the text field is ever read; everything else in a record is ignored and
never stored, so no tweet ids, user handles, or raw text survive into any
downstream artifact.
"""
from __future__ import annotations

import gzip
import io
import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import DataError

# A normalized tweet is just its token sequence; hashtags keep a '#' prefix.
CleanTweet = list[str]

GZIP_MAGIC = b"\x1f\x8b"

_KEEP_RE = re.compile(r"[^a-z0-9_#]+")
_HASHTAG_SPAN_RE = re.compile(r"#[a-z0-9_]+")


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str


@dataclass
class CorpusStats:
    """Line counters filled in while a corpus stream is consumed."""

    kept: int = 0
    skipped: int = 0


def _tweet_text(obj: object) -> str | None:
    """Pull the text field out of one decoded record, or None if absent.

    Prefers the untruncated ``full_text`` (top level or under
    ``extended_tweet``) over plain ``text``.
    """
    if not isinstance(obj, dict):
        return None
    text = obj.get("full_text")
    if not isinstance(text, str):
        ext = obj.get("extended_tweet")
        text = ext.get("full_text") if isinstance(ext, dict) else None
    if not isinstance(text, str):
        text = obj.get("text")
    return text if isinstance(text, str) else None


def _open_text(path: Path) -> IO[str]:
    fh = open(path, "rb")
    if fh.peek(2)[:2] == GZIP_MAGIC:
        return io.TextIOWrapper(gzip.open(fh), encoding="utf-8", errors="replace")
    return io.TextIOWrapper(fh, encoding="utf-8", errors="replace")


def load_corpus(path: str | Path, stats: CorpusStats | None = None) -> Iterator[RawTweet]:
    """Stream tweets from a tweet-per-line JSON file, in file order.

    Holds one line in memory at a time. Malformed lines (bad JSON, or no
    usable text field) are skipped and counted in ``stats.skipped``.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    if stats is None:
        stats = CorpusStats()
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                stats.skipped += 1
                continue
            text = _tweet_text(obj)
            if text is None:
                stats.skipped += 1
                continue
            raw_id = obj.get("id_str") or obj.get("id")
            tweet_id = str(raw_id) if raw_id is not None else str(lineno)
            stats.kept += 1
            yield RawTweet(id=tweet_id, text=text)


def normalize(text: str) -> CleanTweet:
    """Normalize raw tweet text into a clean token sequence.

    NFC, lowercase, whitespace-split; URL and @-mention tokens dropped;
    every character outside [a-z0-9_#] stripped; a token containing '#'
    is reduced to its first well-formed hashtag span (or loses the '#'
    entirely if no span exists); leading retweet markers dropped last.

    The leading-``rt`` removal runs after stripping and empty-token
    dropping, and repeats while the first token is ``rt``; doing it
    earlier breaks idempotence on inputs like ``"rt: x"`` or ``"rt rt x"``.
    """
    text = unicodedata.normalize("NFC", text).lower()
    tokens: CleanTweet = []
    for tok in text.split():
        if tok.startswith(("http://", "https://", "@")):
            continue
        tok = _KEEP_RE.sub("", tok)
        if "#" in tok:
            span = _HASHTAG_SPAN_RE.search(tok)
            tok = span.group(0) if span else tok.replace("#", "")
        if tok:
            tokens.append(tok)
    while tokens and tokens[0] == "rt":
        del tokens[0]
    return tokens


def extract_hashtags(tweet: CleanTweet) -> list[str]:
    """Hashtag subsequence of a clean tweet, order and multiplicity kept."""
    return [tok for tok in tweet if tok.startswith("#")]


def write_token_file(path: str | Path, tweets: Iterable[CleanTweet]) -> int:
    """Write normalized tweets one per line, space-separated, LF endings.

    Returns the number of lines written. Empty token sequences still
    produce a (blank) line so tweet counts are preserved.
    """
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tweet in tweets:
            fh.write(" ".join(tweet))
            fh.write("\n")
            n += 1
    return n


def read_token_file(path: str | Path) -> Iterator[CleanTweet]:
    """Stream token sequences back from a token file."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"token file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield line.split()


def ingest_file(input_path: str | Path, output_path: str | Path) -> CorpusStats:
    """Run the full ingest step: corpus file in, token file out."""
    stats = CorpusStats()
    tweets = load_corpus(input_path, stats)
    write_token_file(output_path, (normalize(t.text) for t in tweets))
    return stats
