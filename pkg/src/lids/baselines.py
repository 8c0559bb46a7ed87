"""Benchmark summary mechanisms: word-sample summaries and topic corpora.

The word-sample ("naive") summary draws words i.i.d. uniformly over the
reference's word occurrences, with replacement, so selection probability
is proportional to frequency. Off-topic benchmark texts are repo data
loaded through a tab-separated manifest; they are never generated here.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyReference, EmptyText, MalformedManifest, MissingFile


@dataclass(frozen=True)
class WordSample:
    words: tuple[str, ...]
    seed: int
    source_length: int


def split_words(text: str) -> list[str]:
    """Whitespace-delimited words with boundary punctuation stripped.

    Case is preserved and interior punctuation (hyphens, apostrophes)
    is kept, so samples re-embed cleanly.
    """
    words = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and unicodedata.category(chunk[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(chunk[end - 1]).startswith("P"):
            end -= 1
        if end > start:
            words.append(chunk[start:end])
    return words


def naive_summary(reference_words: list[str], target_len: int, seed: int) -> WordSample:
    """Frequency-proportional random word sample of exactly target_len words."""
    if not reference_words:
        raise EmptyReference("reference has no words")
    if target_len < 1:
        raise ValueError(f"target_len must be >= 1, got {target_len}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(reference_words), size=target_len)
    return WordSample(
        words=tuple(reference_words[i] for i in idx),
        seed=int(seed),
        source_length=len(reference_words),
    )


def load_topic_corpus(manifest: Path) -> list[tuple[str, str]]:
    """Read `<topic>\\t<relative-path>` lines; returns (topic, text) pairs."""
    manifest = Path(manifest)
    if not manifest.is_file():
        raise MissingFile(str(manifest))
    base = manifest.parent
    out = []
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedManifest(f"{manifest}:{lineno}: expected '<topic>\\t<path>'")
        topic, rel = parts
        path = base / rel
        if not path.is_file():
            raise MissingFile(str(path))
        text = path.read_text(encoding="utf-8")
        if not text.strip():
            raise EmptyText(str(path))
        out.append((topic, text))
    return out
