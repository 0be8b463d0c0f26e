"""Training-set construction from noisy confidence statistics.

The sampling pipeline runs three stages in order:

1. keep noisy rows whose confidence std lies in a closed interval
   [std_low, std_high] (low disagreement between the annotating models
   means the label statistic is trustworthy);
2. append an auxiliary clean dataset, every row labeled OFF;
3. optionally subsample the majority class, seeded and uniform without
   replacement, until the class counts are exactly equal.

A threshold sweep utility evaluates candidate intervals under a caller
supplied train-and-eval callback and ranks them by macro-F1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .corpus import (
    NOT,
    OFF,
    SOURCE_CLEAN,
    SOURCE_NOISY,
    LabeledExample,
    TweetRecord,
    load_noisy_dataset,
)
from .errors import ConfigError, DataError, SweepError

Candidate = tuple[float, float]


@dataclass(frozen=True)
class SamplerConfig:
    """Thresholds and seeding for one sampling run."""

    std_low: float
    std_high: float
    label_threshold: float = 0.5
    seed: int = 0
    balance: bool = True

    def __post_init__(self):
        if not 0.0 <= self.std_low <= 1.0 or not 0.0 <= self.std_high <= 1.0:
            raise ConfigError("std thresholds must lie in [0, 1]")
        if self.std_low > self.std_high:
            raise ConfigError(
                f"std_low {self.std_low} must not exceed std_high {self.std_high}"
            )
        if not 0.0 <= self.label_threshold <= 1.0:
            raise ConfigError("label_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class SampleSummary:
    """Stage-by-stage record counts for one sampling run."""

    input_count_a: int
    selected_count: int
    aux_count_b: int
    removed_for_balance: int
    final_count: int
    final_off: int
    final_not: int

    def __post_init__(self):
        counts = (
            self.input_count_a,
            self.selected_count,
            self.aux_count_b,
            self.removed_for_balance,
            self.final_count,
            self.final_off,
            self.final_not,
        )
        if any(c < 0 for c in counts):
            raise ValueError("summary counts must be non-negative")
        if self.final_count != self.selected_count + self.aux_count_b - self.removed_for_balance:
            raise ValueError("final_count inconsistent with stage counts")
        if self.final_off + self.final_not != self.final_count:
            raise ValueError("class counts do not sum to final_count")


_SUMMARY_FIELDS = (
    "input_count_a",
    "selected_count",
    "aux_count_b",
    "removed_for_balance",
    "final_count",
    "final_off",
    "final_not",
)


def format_summary(summary: SampleSummary) -> str:
    """Render a summary as the key-value text block emitted by the CLI."""
    return "".join(f"{name}\t{getattr(summary, name)}\n" for name in _SUMMARY_FIELDS)


def parse_summary(text: str, path: str | None = None) -> SampleSummary:
    """Parse a key-value summary block written by format_summary."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("\t")
        if not sep or key not in _SUMMARY_FIELDS:
            raise DataError(f"unrecognized summary line {line!r}", path=path, line=lineno)
        try:
            values[key] = int(value)
        except ValueError:
            raise DataError(f"non-integer count {value!r}", path=path, line=lineno) from None
    missing = [name for name in _SUMMARY_FIELDS if name not in values]
    if missing:
        raise DataError(f"summary is missing fields: {', '.join(missing)}", path=path)
    return SampleSummary(**values)


def derive_label(record: TweetRecord, label_threshold: float = 0.5) -> str:
    """Binarize the confidence mean; ties at the threshold go to OFF."""
    return OFF if record.avg_conf >= label_threshold else NOT


def filter_by_std(
    records: Iterable[TweetRecord], std_low: float, std_high: float
) -> Iterator[TweetRecord]:
    """Yield records whose std_conf lies in the closed interval, in order."""
    if std_low > std_high:
        raise ConfigError(f"std_low {std_low} must not exceed std_high {std_high}")
    for record in records:
        if std_low <= record.std_conf <= std_high:
            yield record


def merge_auxiliary(
    selected: Sequence[LabeledExample], aux: Iterable[TweetRecord]
) -> list[LabeledExample]:
    """Append the clean auxiliary records, every one labeled OFF.

    No deduplication across the two sources: a tweet present in both
    contributes two examples.
    """
    merged = list(selected)
    merged.extend(
        LabeledExample(rec.id, rec.text, OFF, SOURCE_CLEAN) for rec in aux
    )
    return merged


def balance_classes(
    examples: Sequence[LabeledExample], seed: int
) -> tuple[list[LabeledExample], int]:
    """Subsample the majority class until class counts are exactly equal.

    Minority examples are all retained; majority survivors are chosen
    uniformly without replacement (seeded) and keep their relative order.
    Returns the balanced list and the number of removed examples.
    """
    off_count = sum(1 for ex in examples if ex.label == OFF)
    not_count = len(examples) - off_count
    if off_count == not_count:
        return list(examples), 0
    majority = OFF if off_count > not_count else NOT
    keep = min(off_count, not_count)
    majority_positions = [i for i, ex in enumerate(examples) if ex.label == majority]
    rng = random.Random(seed)
    surviving = set(rng.sample(majority_positions, keep))
    balanced = [
        ex
        for i, ex in enumerate(examples)
        if ex.label != majority or i in surviving
    ]
    return balanced, len(majority_positions) - keep


def run_sampling(
    config: SamplerConfig, path_a: str | Path, path_b: str | Path
) -> tuple[list[LabeledExample], SampleSummary]:
    """Run the full sampling pipeline over the noisy and auxiliary corpora.

    Deterministic: the output is a pure function of the config and the
    input file bytes.
    """
    input_count_a = 0
    selected: list[LabeledExample] = []

    def counting(records: Iterator[TweetRecord]) -> Iterator[TweetRecord]:
        nonlocal input_count_a
        for record in records:
            input_count_a += 1
            yield record

    for record in filter_by_std(
        counting(load_noisy_dataset(path_a)), config.std_low, config.std_high
    ):
        selected.append(
            LabeledExample(
                record.id,
                record.text,
                derive_label(record, config.label_threshold),
                SOURCE_NOISY,
            )
        )
    selected_count = len(selected)

    aux = list(load_noisy_dataset(path_b))
    merged = merge_auxiliary(selected, aux)

    if config.balance:
        final, removed = balance_classes(merged, config.seed)
    else:
        final, removed = merged, 0

    final_off = sum(1 for ex in final if ex.label == OFF)
    summary = SampleSummary(
        input_count_a=input_count_a,
        selected_count=selected_count,
        aux_count_b=len(aux),
        removed_for_balance=removed,
        final_count=len(final),
        final_off=final_off,
        final_not=len(final) - final_off,
    )
    return final, summary


def threshold_sweep(
    candidates: Sequence[Candidate],
    train_and_eval: Callable[[float, float], float],
    budget: int,
    seed: int,
) -> list[tuple[Candidate, float]]:
    """Evaluate a random subsample of candidate intervals and rank them.

    min(budget, len(candidates)) candidates are drawn without replacement
    (seeded). Ranking is by descending macro-F1; ties break toward the
    narrower interval, then the lower bound.
    """
    if not candidates:
        raise ConfigError("candidate list must be non-empty")
    if budget < 1:
        raise ConfigError("budget must be at least 1")
    for low, high in candidates:
        if low > high:
            raise ConfigError(f"candidate [{low}, {high}] has low > high")

    rng = random.Random(seed)
    count = min(budget, len(candidates))
    chosen = rng.sample(range(len(candidates)), count)

    scored: list[tuple[Candidate, float]] = []
    for index in sorted(chosen):
        low, high = candidates[index]
        try:
            f1 = train_and_eval(low, high)
        except Exception as exc:
            raise SweepError(f"candidate [{low}, {high}] failed: {exc}") from exc
        scored.append(((low, high), f1))

    scored.sort(key=lambda item: (-item[1], item[0][1] - item[0][0], item[0][0]))
    return scored
