"""Shared synthetic-corpus builders for the test suite.

The two-vocabulary generator produces linearly separable classes: every
OFF text draws only from one vocabulary, every NOT text only from the
other, so any sane text classifier separates them.

The noise-corrupted generator models annotation noise that grows with
the confidence std: texts always reflect the true label, but the stored
confidence mean is flipped with probability increasing in std_conf, so
low-std rows carry trustworthy labels and high-std rows do not.
"""

from __future__ import annotations

import random

from noisy_offense.corpus import GOLD_HEADER, NOISY_HEADER, NOT, OFF, LabeledExample

OFF_VOCAB = (
    "grobble", "snarkle", "vexing", "blargh", "craven", "fuming",
    "rancor", "spite", "venom", "scorn", "bile", "wrath",
)
NOT_VOCAB = (
    "meadow", "gentle", "sunny", "breeze", "garden", "smile",
    "cheery", "mellow", "serene", "placid", "bloom", "grace",
)


def write_noisy_tsv(path, rows) -> None:
    """rows: iterable of (id, text, avg_conf, std_conf); values written as given."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(NOISY_HEADER + "\n")
        for rec_id, text, avg, std in rows:
            fh.write(f"{rec_id}\t{text}\t{avg}\t{std}\n")


def write_gold_tsv(path, rows) -> None:
    """rows: iterable of (id, text, label)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(GOLD_HEADER + "\n")
        for rec_id, text, label in rows:
            fh.write(f"{rec_id}\t{text}\t{label}\n")


def vocab_text(rng: random.Random, vocab, length=None) -> str:
    length = length or rng.randint(5, 9)
    return " ".join(rng.choice(vocab) for _ in range(length))


def separable_examples(n_per_class: int, seed: int = 0) -> list[LabeledExample]:
    """Linearly separable two-class training set with disjoint vocabularies."""
    rng = random.Random(seed)
    examples = []
    for i in range(n_per_class):
        examples.append(
            LabeledExample(f"off{i}", vocab_text(rng, OFF_VOCAB), OFF, "NOISY_A")
        )
        examples.append(
            LabeledExample(f"not{i}", vocab_text(rng, NOT_VOCAB), NOT, "NOISY_A")
        )
    return examples


def noise_corrupted_rows(n: int, seed: int, corruption=lambda std: 0.05 + 0.8 * std):
    """Noisy-corpus rows whose label corruption probability grows with std.

    Returns (rows, true_labels): rows are (id, text, avg, std) ready for
    write_noisy_tsv, true_labels maps id -> the uncorrupted label.
    """
    rng = random.Random(seed)
    rows = []
    truth = {}
    for i in range(n):
        true_off = rng.random() < 0.5
        std = round(rng.random(), 4)
        flipped = rng.random() < corruption(std)
        observed_off = true_off != flipped
        avg = round(rng.uniform(0.55, 0.95) if observed_off else rng.uniform(0.05, 0.45), 4)
        text = vocab_text(rng, OFF_VOCAB if true_off else NOT_VOCAB)
        rec_id = f"n{i}"
        rows.append((rec_id, text, avg, std))
        truth[rec_id] = OFF if true_off else NOT
    return rows, truth


def clean_gold_rows(n: int, seed: int):
    """Clean evaluation rows over the same two vocabularies."""
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        is_off = rng.random() < 0.5
        vocab = OFF_VOCAB if is_off else NOT_VOCAB
        rows.append((f"g{i}", vocab_text(rng, vocab), OFF if is_off else NOT))
    return rows
