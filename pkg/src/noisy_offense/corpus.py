"""Data model, text normalization, and TSV ingestion shared by all stages.

Three file formats live here:

- noisy corpus TSV:  header ``id\ttext\tavg_conf\tstd_conf``, one tweet per
  row with the ensemble confidence mean/std in [0, 1];
- gold corpus TSV:   header ``id\ttext\tlabel``, label is exactly ``OFF``
  or ``NOT`` (case-sensitive);
- wordlist:          one term per line, ``#`` comments and blank lines
  ignored, terms stored case-folded.

Malformed rows are fatal rather than skipped: silently dropping rows from
a sampling pipeline corrupts every downstream statistic.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError

OFF = "OFF"
NOT = "NOT"
LABELS = (OFF, NOT)

SOURCE_NOISY = "NOISY_A"
SOURCE_CLEAN = "CLEAN_B"
SOURCES = (SOURCE_NOISY, SOURCE_CLEAN)

NOISY_HEADER = "id\ttext\tavg_conf\tstd_conf"
GOLD_HEADER = "id\ttext\tlabel"

# Tabs and line breaks would corrupt the TSV framing, so record text is
# sanitized to single spaces at construction time.
_FIELD_SANITIZE = str.maketrans({"\t": " ", "\n": " ", "\r": " "})


def sanitize_field(text: str) -> str:
    """Replace tabs and newlines with single spaces so text is TSV-safe."""
    return text.translate(_FIELD_SANITIZE)


def normalize_text(text: str) -> str:
    """Canonical form used for feature extraction and wordlist matching.

    Unicode canonical composition, full case-folding, whitespace runs
    collapsed to a single space, leading/trailing whitespace stripped.
    Idempotent: normalize_text(normalize_text(x)) == normalize_text(x).
    """
    if text.isascii():
        # fast path: casefold == lower and NFC is the identity on ASCII
        return " ".join(text.lower().split())
    folded = unicodedata.normalize("NFC", text).casefold()
    return " ".join(unicodedata.normalize("NFC", folded).split())


@dataclass(frozen=True)
class TweetRecord:
    """One noisy-corpus row: confidence statistics instead of a label."""

    id: str
    text: str
    avg_conf: float
    std_conf: float

    def __post_init__(self):
        object.__setattr__(self, "text", sanitize_field(self.text))
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not 0.0 <= self.avg_conf <= 1.0:
            raise ValueError(f"avg_conf {self.avg_conf!r} outside [0, 1]")
        if not 0.0 <= self.std_conf <= 1.0:
            raise ValueError(f"std_conf {self.std_conf!r} outside [0, 1]")
        if not normalize_text(self.text):
            raise ValueError("text is empty after normalization")


@dataclass(frozen=True)
class GoldRecord:
    """A trusted (id, text, label) row used for evaluation."""

    id: str
    text: str
    label: str

    def __post_init__(self):
        object.__setattr__(self, "text", sanitize_field(self.text))
        if not self.id:
            raise ValueError("record id must be non-empty")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r} (expected OFF or NOT)")
        if not normalize_text(self.text):
            raise ValueError("text is empty after normalization")


@dataclass(frozen=True)
class LabeledExample:
    """A training row with label provenance (noisy corpus vs clean aux set).

    Every clean-source example is offensive by construction: the auxiliary
    dataset contains offensive tweets only.
    """

    id: str
    text: str
    label: str
    source: str

    def __post_init__(self):
        object.__setattr__(self, "text", sanitize_field(self.text))
        if not self.id:
            raise ValueError("record id must be non-empty")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r} (expected OFF or NOT)")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.source == SOURCE_CLEAN and self.label != OFF:
            raise ValueError("clean-source examples are offensive by definition")
        if not normalize_text(self.text):
            raise ValueError("text is empty after normalization")


@dataclass(frozen=True)
class Wordlist:
    """Case-folded offensive terms driving the post-processing override."""

    terms: frozenset[str] = field(default_factory=frozenset)
    source_path: str = ""

    def __post_init__(self):
        for term in self.terms:
            if not term:
                raise ValueError("wordlist terms must be non-empty")
            if term != normalize_text(term):
                raise ValueError(f"wordlist term {term!r} is not normalized")

    def __len__(self) -> int:
        return len(self.terms)


def _read_header(fh, path: str, expected: str) -> None:
    header = fh.readline()
    if header.rstrip("\r\n") != expected:
        raise DataError(
            f"missing or wrong header (expected {expected!r})", path=path, line=1
        )


def _parse_conf(value: str, name: str, path: str, line: int) -> float:
    try:
        parsed = float(value)
    except ValueError:
        raise DataError(f"unparsable {name} {value!r}", path=path, line=line) from None
    if not 0.0 <= parsed <= 1.0:
        raise DataError(f"{name} {value!r} outside [0, 1]", path=path, line=line)
    return parsed


def load_noisy_dataset(path: str | Path) -> Iterator[TweetRecord]:
    """Stream TweetRecords from a noisy corpus TSV, in file order.

    Raises DataError with the 1-based line number for a missing header,
    wrong column count, unparsable confidence, or out-of-range value.
    """
    path = str(path)
    with open(path, encoding="utf-8", newline="") as fh:
        _read_header(fh, path, NOISY_HEADER)
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\r\n").split("\t")
            if len(fields) != 4:
                raise DataError(
                    f"expected 4 tab-separated fields, got {len(fields)}",
                    path=path,
                    line=lineno,
                )
            rec_id, text, avg_raw, std_raw = fields
            avg = _parse_conf(avg_raw, "avg_conf", path, lineno)
            std = _parse_conf(std_raw, "std_conf", path, lineno)
            try:
                yield TweetRecord(rec_id, text, avg, std)
            except ValueError as exc:
                raise DataError(str(exc), path=path, line=lineno) from None


def load_gold_dataset(path: str | Path) -> list[GoldRecord]:
    """Load a gold corpus TSV. Unknown labels are fatal (case-sensitive)."""
    path = str(path)
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        _read_header(fh, path, GOLD_HEADER)
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\r\n").split("\t")
            if len(fields) != 3:
                raise DataError(
                    f"expected 3 tab-separated fields, got {len(fields)}",
                    path=path,
                    line=lineno,
                )
            rec_id, text, label = fields
            try:
                records.append(GoldRecord(rec_id, text, label))
            except ValueError as exc:
                raise DataError(str(exc), path=path, line=lineno) from None
    return records


def load_wordlist(path: str | Path) -> Wordlist:
    """Load a wordlist file: one term per line, case-folded and deduplicated."""
    path = str(path)
    terms = set()
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if line.startswith("#") or not line.strip():
                continue
            term = normalize_text(line)
            if not term:
                raise DataError("term is empty after normalization", path=path, line=lineno)
            terms.add(term)
    return Wordlist(terms=frozenset(terms), source_path=path)


def write_noisy_dataset(records: Iterable[TweetRecord], path: str | Path) -> int:
    """Write records in the noisy TSV format. Returns the row count.

    Confidences are serialized with repr() so a reload reproduces the
    exact float values.
    """
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(NOISY_HEADER + "\n")
        for rec in records:
            fh.write(f"{rec.id}\t{rec.text}\t{rec.avg_conf!r}\t{rec.std_conf!r}\n")
            count += 1
    return count


def write_gold_dataset(rows: Iterable[GoldRecord | LabeledExample], path: str | Path) -> int:
    """Write (id, text, label) rows in the gold TSV format.

    Accepts anything with id/text/label attributes, so sampled training
    examples serialize through the same path as gold records.
    """
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(GOLD_HEADER + "\n")
        for row in rows:
            fh.write(f"{row.id}\t{row.text}\t{row.label}\n")
            count += 1
    return count


def load_id_text_pairs(path: str | Path) -> list[tuple[str, str]]:
    """Load (id, text) pairs from either a gold or a noisy TSV.

    The header decides the schema; extra columns beyond id/text are ignored.
    Used by prediction commands, which do not need labels or confidences.
    """
    path = str(path)
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header == NOISY_HEADER:
            ncols = 4
        elif header == GOLD_HEADER:
            ncols = 3
        else:
            raise DataError("unrecognized header (expected gold or noisy TSV)", path=path, line=1)
        pairs = []
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\r\n").split("\t")
            if len(fields) != ncols:
                raise DataError(
                    f"expected {ncols} tab-separated fields, got {len(fields)}",
                    path=path,
                    line=lineno,
                )
            if not fields[0]:
                raise DataError("record id must be non-empty", path=path, line=lineno)
            pairs.append((fields[0], fields[1]))
    return pairs
