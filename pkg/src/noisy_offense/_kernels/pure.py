"""Pure-Python implementations of the hot kernels.

Reference semantics for the optional C extension: both backends must
produce identical outputs for identical inputs.

Feature hashing scheme (stable across platforms and backends):
FNV-1a 64-bit over the UTF-8 bytes of the token, prefixed with a
namespace byte (``c`` for character n-grams, ``w`` for word unigrams)
and a NUL separator; the index is the hash masked by feature_dim - 1.
"""

from __future__ import annotations

import re
from collections import deque

BACKEND = "pure"

# word boundary = ASCII whitespace, matching the byte-level C kernel;
# normalized text only ever contains single U+0020 separators anyway
_WORD_RE = re.compile(r"[^ \t\n\v\f\r]+")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _U64
    return h


def ngram_feature_counts(
    text: str, ngram_min: int, ngram_max: int, word_unigrams: bool, mask: int
) -> dict[int, float]:
    """Hashed character n-gram and word unigram counts for one text.

    The text is expected to be normalized already; the kernel itself is
    agnostic and hashes whatever it is given.
    """
    counts: dict[int, float] = {}
    length = len(text)
    for n in range(ngram_min, ngram_max + 1):
        for i in range(length - n + 1):
            key = fnv1a64(b"c\x00" + text[i : i + n].encode("utf-8")) & mask
            counts[key] = counts.get(key, 0.0) + 1.0
    if word_unigrams:
        for word in _WORD_RE.findall(text):
            key = fnv1a64(b"w\x00" + word.encode("utf-8")) & mask
            counts[key] = counts.get(key, 0.0) + 1.0
    return counts


class PatternMatcher:
    """Multi-pattern substring matcher (Aho-Corasick over UTF-8 bytes).

    Byte-level matching is equivalent to character-level matching here:
    UTF-8 is self-synchronizing, so an encoded pattern can only occur at
    character boundaries of the encoded text.

    best_match returns, among all patterns occurring as substrings, the
    longest one (ties broken lexicographically smallest), or None.
    """

    def __init__(self, terms):
        for term in terms:
            if not term:
                raise ValueError("patterns must be non-empty")
        # priority order: longest first, then lexicographic
        self.terms: list[str] = sorted(set(terms), key=lambda t: (-len(t), t))
        self._build()

    def _build(self) -> None:
        sentinel = len(self.terms)
        goto: list[dict[int, int]] = [{}]
        best: list[int] = [sentinel]
        for priority, term in enumerate(self.terms):
            state = 0
            for byte in term.encode("utf-8"):
                nxt = goto[state].get(byte)
                if nxt is None:
                    nxt = len(goto)
                    goto[state][byte] = nxt
                    goto.append({})
                    best.append(sentinel)
                state = nxt
            best[state] = min(best[state], priority)

        fail = [0] * len(goto)
        queue = deque(goto[0].values())
        while queue:
            state = queue.popleft()
            # a pattern ending at the fail state also ends here
            best[state] = min(best[state], best[fail[state]])
            for byte, child in goto[state].items():
                fallback = fail[state]
                while fallback and byte not in goto[fallback]:
                    fallback = fail[fallback]
                fail[child] = goto[fallback].get(byte, 0)
                if fail[child] == child:
                    fail[child] = 0
                queue.append(child)

        self._goto = goto
        self._fail = fail
        self._best = best
        self._sentinel = sentinel

    def best_match(self, text: str) -> str | None:
        goto = self._goto
        fail = self._fail
        best = self._best
        state = 0
        found = self._sentinel
        for byte in text.encode("utf-8"):
            while state and byte not in goto[state]:
                state = fail[state]
            state = goto[state].get(byte, 0)
            if best[state] < found:
                found = best[state]
                if found == 0:
                    break  # highest-priority pattern already found
        return self.terms[found] if found < self._sentinel else None
