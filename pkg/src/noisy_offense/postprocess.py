"""Wordlist override stage: force OFF when a listed term occurs in a tweet.

Matching is substring matching on the normalized (case-folded) text, no
word boundaries ("Dongle" matches "dong"). When several terms occur, the
longest one wins, ties broken lexicographically, so override provenance
is deterministic. The matcher is a single-pass multi-pattern automaton;
the naive per-term scan survives only in the test suite as the oracle.

Every match is logged, including matches on tweets that were already
OFF, so trigger counts stay observable in the final report.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import _kernels
from .corpus import NOT, OFF, Wordlist, normalize_text
from .classifier import Prediction
from .errors import DataError


@dataclass(frozen=True)
class OverrideLogEntry:
    """One wordlist trigger: which term fired and whether the label flipped."""

    id: str
    matched_term: str
    prior_label: str
    changed: bool

    def __post_init__(self):
        if self.prior_label not in (OFF, NOT):
            raise ValueError(f"unknown label {self.prior_label!r}")
        if self.changed != (self.prior_label == NOT):
            raise ValueError("changed must hold exactly when the prior label was NOT")


@lru_cache(maxsize=8)
def _compile(terms: frozenset[str]):
    return _kernels.PatternMatcher(terms)


def matches_wordlist(text: str, wordlist: Wordlist) -> str | None:
    """The matching term for a text, or None.

    Returns the longest matching term (ties: lexicographically smallest).
    """
    if not wordlist.terms:
        return None
    return _compile(wordlist.terms).best_match(normalize_text(text))


def apply_postprocess(
    predictions: Sequence[Prediction],
    texts: Mapping[str, str],
    wordlist: Wordlist,
) -> tuple[list[Prediction], list[OverrideLogEntry]]:
    """Override predictions whose text contains a wordlist term.

    Output order equals input order and OFF labels are never demoted, so
    applying the stage twice is a no-op. Raises DataError when a
    prediction id has no text.
    """
    matcher = _compile(wordlist.terms) if wordlist.terms else None
    output: list[Prediction] = []
    log: list[OverrideLogEntry] = []
    for pred in predictions:
        try:
            text = texts[pred.id]
        except KeyError:
            raise DataError(f"no text provided for prediction id {pred.id!r}") from None
        term = matcher.best_match(normalize_text(text)) if matcher else None
        if term is None:
            output.append(pred)
            continue
        log.append(OverrideLogEntry(pred.id, term, pred.label, pred.label == NOT))
        output.append(
            Prediction(pred.id, OFF, pred.score, overridden=True, override_term=term)
        )
    return output, log


OVERRIDE_LOG_HEADER = "id\tmatched_term\tprior_label\tchanged"


def write_override_log(entries: Iterable[OverrideLogEntry], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(OVERRIDE_LOG_HEADER + "\n")
        for entry in entries:
            flag = "true" if entry.changed else "false"
            fh.write(f"{entry.id}\t{entry.matched_term}\t{entry.prior_label}\t{flag}\n")
            count += 1
    return count


def read_override_log(path: str | Path) -> list[OverrideLogEntry]:
    path = str(path)
    entries = []
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != OVERRIDE_LOG_HEADER:
            raise DataError(
                f"missing or wrong header (expected {OVERRIDE_LOG_HEADER!r})", path=path, line=1
            )
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\r\n").split("\t")
            if len(fields) != 4:
                raise DataError(
                    f"expected 4 tab-separated fields, got {len(fields)}", path=path, line=lineno
                )
            rec_id, term, prior, flag = fields
            if flag not in ("true", "false"):
                raise DataError(f"bad changed flag {flag!r}", path=path, line=lineno)
            try:
                entries.append(OverrideLogEntry(rec_id, term, prior, flag == "true"))
            except ValueError as exc:
                raise DataError(str(exc), path=path, line=lineno) from None
    return entries
