"""False-positive bucketing and the final pipeline report.

Bucketing is an explicit heuristic approximation of a manual error
taxonomy. Each false positive (gold NOT, predicted OFF) gets exactly one
bucket, assigned by the first matching stage of a fixed cascade:

1. RHETORICAL   a question marker occurs in the text;
2. SWEAR        a swear indicator occurs as a whole token (token-level on
                purpose: the substring matcher would count "sucks" inside
                "suck" and misfile tweets the taxonomy separates);
3. HUMOR        a humor marker occurs (word markers as whole tokens,
                symbol markers such as emoticons as substrings);
4. RARE_WORD    the wordlist override flipped this tweet to OFF;
5. UNBUCKETED   everything else, including cases only a human can judge.

Because later stages only see tweets earlier stages passed over, editing
a later stage's configuration never changes earlier assignments.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import NOT, OFF, GoldRecord, normalize_text
from .classifier import Prediction
from .metrics import ClassMetrics, ConfusionMatrix, confusion, format_metrics
from .postprocess import OverrideLogEntry
from .sampler import SampleSummary, format_summary
from .errors import ConfigError

RHETORICAL = "RHETORICAL"
SWEAR = "SWEAR"
HUMOR = "HUMOR"
RARE_WORD = "RARE_WORD"
UNBUCKETED = "UNBUCKETED"
BUCKETS = (RHETORICAL, SWEAR, HUMOR, RARE_WORD, UNBUCKETED)

_TOKEN_RE = re.compile(r"\w+")

DEFAULT_QUESTION_MARKERS = ("?",)
DEFAULT_SWEAR_INDICATORS = (
    "sucks",
    "sick",
    "sex",
    "disgusting",
    "kill",
    "ugly",
    "porn",
    "crack",
    "fuck",
    "butt",
    "murder",
)
DEFAULT_HUMOR_MARKERS = ("lol", "lmao", ":)", ":d", ":p", ";)", "xd", "\U0001f602", "\U0001f923")


@dataclass(frozen=True)
class BucketConfig:
    """Marker lists driving the cascade; all entries stored normalized."""

    question_markers: tuple[str, ...] = DEFAULT_QUESTION_MARKERS
    swear_indicators: tuple[str, ...] = DEFAULT_SWEAR_INDICATORS
    humor_markers: tuple[str, ...] = DEFAULT_HUMOR_MARKERS
    min_tokens: int = 5

    def __post_init__(self):
        if self.min_tokens < 1:
            raise ConfigError("min_tokens must be at least 1")
        for name in ("question_markers", "swear_indicators", "humor_markers"):
            markers = getattr(self, name)
            if any(not m for m in markers):
                raise ConfigError(f"{name} must not contain empty strings")
            object.__setattr__(
                self, name, tuple(normalize_text(m) for m in markers)
            )


@dataclass(frozen=True)
class BucketReport:
    """Cascade output: per-tweet assignments plus aggregate counts."""

    assignments: Mapping[str, str]
    counts: Mapping[str, int]
    short_tweet_count: int  # tweets under min_tokens tokens (statistic, not a bucket)

    @property
    def total(self) -> int:
        return len(self.assignments)


def false_positives(
    gold: Sequence[GoldRecord], preds: Sequence[Prediction]
) -> list[tuple[str, str]]:
    """(id, text) of every gold-NOT tweet predicted OFF, in gold order."""
    confusion(gold, preds)  # enforce id alignment with the same errors
    predicted = {pred.id: pred.label for pred in preds}
    return [
        (rec.id, rec.text)
        for rec in gold
        if rec.label == NOT and predicted[rec.id] == OFF
    ]


def _assign(
    text: str, cfg: BucketConfig, was_overridden: bool
) -> tuple[str, int]:
    normalized = normalize_text(text)
    tokens = _TOKEN_RE.findall(normalized)
    token_set = set(tokens)
    bucket = UNBUCKETED
    if any(marker in normalized for marker in cfg.question_markers):
        bucket = RHETORICAL
    elif any(indicator in token_set for indicator in cfg.swear_indicators):
        bucket = SWEAR
    elif any(
        (marker in token_set) if marker.isalnum() else (marker in normalized)
        for marker in cfg.humor_markers
    ):
        bucket = HUMOR
    elif was_overridden:
        bucket = RARE_WORD
    return bucket, len(tokens)


def bucket_false_positives(
    fps: Sequence[tuple[str, str]],
    cfg: BucketConfig,
    override_log: Iterable[OverrideLogEntry] = (),
) -> BucketReport:
    """Assign each false positive to exactly one bucket via the cascade."""
    changed_ids = {entry.id for entry in override_log if entry.changed}
    assignments: dict[str, str] = {}
    counts: Counter[str] = Counter({bucket: 0 for bucket in BUCKETS})
    short = 0
    for fp_id, text in fps:
        bucket, token_count = _assign(text, cfg, fp_id in changed_ids)
        assignments[fp_id] = bucket
        counts[bucket] += 1
        if token_count < cfg.min_tokens:
            short += 1
    return BucketReport(assignments=assignments, counts=dict(counts), short_tweet_count=short)


BUCKET_TSV_HEADER = "id\tbucket"


def format_bucket_assignments(report: BucketReport) -> str:
    lines = [BUCKET_TSV_HEADER]
    lines.extend(f"{fp_id}\t{bucket}" for fp_id, bucket in report.assignments.items())
    return "\n".join(lines) + "\n"


def render_report(
    summary: SampleSummary | None,
    cm: ConfusionMatrix,
    metrics: ClassMetrics,
    buckets: BucketReport | None,
    override_log: Sequence[OverrideLogEntry] = (),
) -> str:
    """Single human-readable report over every pipeline stage."""
    sections: list[str] = []

    if summary is not None:
        sections.append("== sampling ==\n" + format_summary(summary))

    evaluation = ["== evaluation ==", format_metrics(metrics).rstrip("\n")]
    evaluation.append(f"false_negatives\t{cm.off_not}")
    if cm.off_not == 0:
        evaluation.append(
            f"note: zero false negatives; recall[OFF] = {metrics.recall_off:.4f} exactly"
        )
    sections.append("\n".join(evaluation) + "\n")

    triggered = sum(1 for entry in override_log if entry.changed)
    sections.append(
        "== postprocess ==\n"
        f"override_entries\t{len(override_log)}\n"
        f"override_triggers\t{triggered}\n"
    )

    fp_lines = ["== false positives =="]
    if buckets is None or buckets.total == 0:
        fp_lines.append("no false positives")
    else:
        fp_lines.append(f"total\t{buckets.total}")
        for bucket in BUCKETS:
            count = buckets.counts.get(bucket, 0)
            share = 100.0 * count / buckets.total
            fp_lines.append(f"{bucket}\t{count}\t{share:.1f}%")
        fp_lines.append(f"short_tweets\t{buckets.short_tweet_count}")
    sections.append("\n".join(fp_lines) + "\n")

    return "\n".join(sections)
