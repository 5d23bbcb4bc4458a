"""Cognate pair extraction from aligned word-pair counts.

The pipeline filters a table of (word_a, word_b, count) alignment counts
down to a one-to-one cognate list: drop words containing punctuation or
digits, drop rarely aligned pairs, require closeness under a length-scaled
Levenshtein threshold (exact match for short words), then resolve words
participating in several pairs greedily by descending count.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .edits import levenshtein_distance
from .errors import ContractError, FormatError


@dataclass(frozen=True)
class AlignedPair:
    """Two words aligned to each other `count` times by the word aligner."""

    word_a: str
    word_b: str
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ContractError("alignment count must be positive: %r" % (self,))


def default_excluded_char(ch: str) -> bool:
    """Punctuation (Unicode P*) and digits disqualify a word."""
    cat = unicodedata.category(ch)
    return cat.startswith("P") or cat == "Nd"


def levenshtein_threshold(len_a: int, len_b: int, short_len: int = 4) -> int:
    """Maximum allowed distance for word lengths (len_a, len_b).

    Words of short_len or fewer characters require an exact match; otherwise
    up to a third of the mean length is allowed, rounded up (the mean is
    kept exact, the ceiling applied once to the final quotient).
    """
    if len_a < 1 or len_b < 1:
        raise ContractError("word lengths must be positive")
    if min(len_a, len_b) <= short_len:
        return 0
    return -((len_a + len_b) // -6)  # ceil((len_a + len_b) / 6)


def filter_pairs(
    pairs,
    min_count: int = 2,
    short_len: int = 4,
    excluded_char=default_excluded_char,
) -> list[AlignedPair]:
    """Apply the character, count, and distance filters."""
    kept = []
    for pair in pairs:
        if pair.count < min_count:
            continue
        if any(excluded_char(ch) for ch in pair.word_a + pair.word_b):
            continue
        limit = levenshtein_threshold(len(pair.word_a), len(pair.word_b), short_len)
        if limit == 0:
            if pair.word_a != pair.word_b:
                continue
        elif levenshtein_distance(pair.word_a, pair.word_b) > limit:
            continue
        kept.append(pair)
    return kept


def resolve_unique(pairs) -> list[AlignedPair]:
    """Keep each word's pairing to its most frequent cognate.

    Greedy over the conflict graph: pairs are taken in order of descending
    count (ties by lexicographic partner words) while both words are still
    unclaimed, so no word occurs in two output pairs.
    """
    used_a: set[str] = set()
    used_b: set[str] = set()
    out = []
    for pair in sorted(pairs, key=lambda p: (-p.count, p.word_a, p.word_b)):
        if pair.word_a in used_a or pair.word_b in used_b:
            continue
        used_a.add(pair.word_a)
        used_b.add(pair.word_b)
        out.append(pair)
    return out


def extract(
    pairs,
    min_count: int = 2,
    short_len: int = 4,
    excluded_char=default_excluded_char,
) -> list[AlignedPair]:
    """Full pipeline; output is deterministic and sorted by (word_a, word_b)."""
    resolved = resolve_unique(filter_pairs(pairs, min_count, short_len, excluded_char))
    return sorted(resolved, key=lambda p: (p.word_a, p.word_b))


def read_pairs_tsv(path) -> list[AlignedPair]:
    """Read (word_a, word_b, count) rows from a UTF-8 TSV file."""
    pairs = []
    with open(path, encoding="utf-8") as stream:
        for lineno, line in enumerate(stream, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError("expected 3 tab-separated fields", path, lineno)
            try:
                count = int(fields[2])
            except ValueError:
                raise FormatError("bad count %r" % fields[2], path, lineno) from None
            if count < 1:
                raise FormatError("count must be positive", path, lineno)
            if not fields[0] or not fields[1]:
                raise FormatError("empty word", path, lineno)
            pairs.append(AlignedPair(fields[0], fields[1], count))
    return pairs


def write_pairs_tsv(path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        for pair in pairs:
            stream.write("%s\t%s\t%d\n" % (pair.word_a, pair.word_b, pair.count))
