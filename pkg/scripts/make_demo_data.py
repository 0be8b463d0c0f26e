#!/usr/bin/env python3
"""Generate a small synthetic demo corpus so the CLI runs out of the box.

Writes noisy.tsv (confidence-annotated training corpus), aux.tsv (clean
all-offensive auxiliary set), and gold.tsv (clean test set) into --outdir.
The corpus is synthetic: two disjoint topic vocabularies stand in for
offensive/inoffensive language, and label corruption grows with the
confidence std so interval filtering visibly helps.

    python scripts/make_demo_data.py --outdir demo_data
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

HARSH = (
    "grobble", "snarkle", "vexing", "blargh", "craven", "fuming",
    "rancor", "spite", "venom", "scorn", "bile", "wrath", "zorgle",
)
MILD = (
    "meadow", "gentle", "sunny", "breeze", "garden", "smile",
    "cheery", "mellow", "serene", "placid", "bloom", "grace",
)


def text_of(rng: random.Random, vocab) -> str:
    return " ".join(rng.choice(vocab) for _ in range(rng.randint(5, 9)))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="demo_data")
    parser.add_argument("--rows", type=int, default=5000)
    parser.add_argument("--aux-rows", type=int, default=200)
    parser.add_argument("--test-rows", type=int, default=800)
    parser.add_argument("--seed", type=int, default=2020)
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    with open(outdir / "noisy.tsv", "w", encoding="utf-8") as fh:
        fh.write("id\ttext\tavg_conf\tstd_conf\n")
        for i in range(args.rows):
            truly_off = rng.random() < 0.5
            std = round(rng.random(), 4)
            flipped = rng.random() < 0.05 + 0.8 * std
            observed_off = truly_off != flipped
            avg = rng.uniform(0.55, 0.95) if observed_off else rng.uniform(0.05, 0.45)
            body = text_of(rng, HARSH if truly_off else MILD)
            fh.write(f"n{i}\t{body}\t{avg:.4f}\t{std}\n")

    with open(outdir / "aux.tsv", "w", encoding="utf-8") as fh:
        fh.write("id\ttext\tavg_conf\tstd_conf\n")
        for i in range(args.aux_rows):
            fh.write(f"x{i}\t{text_of(rng, HARSH)}\t0.9000\t0.0100\n")

    with open(outdir / "gold.tsv", "w", encoding="utf-8") as fh:
        fh.write("id\ttext\tlabel\n")
        for i in range(args.test_rows):
            is_off = rng.random() < 0.5
            label = "OFF" if is_off else "NOT"
            fh.write(f"g{i}\t{text_of(rng, HARSH if is_off else MILD)}\t{label}\n")

    print(f"wrote noisy.tsv, aux.tsv, gold.tsv to {outdir}/")


if __name__ == "__main__":
    main()
