#!/usr/bin/env python3
"""Throughput benchmark: compiled kernels vs the pure-Python fallback.

Times the two hot inner loops (hashed n-gram featurization and
multi-pattern wordlist matching) over a synthetic tweet corpus.

    python benchmarks/bench_kernels.py [--texts N] [--terms N]
"""

from __future__ import annotations

import argparse
import random
import time

from noisy_offense._kernels import available_backends


def make_corpus(n_texts: int, seed: int = 7) -> list[str]:
    rng = random.Random(seed)
    words = ["".join(rng.choice("abcdefghijklmnop") for _ in range(rng.randint(3, 9))) for _ in range(500)]
    return [" ".join(rng.choice(words) for _ in range(rng.randint(8, 20))) for _ in range(n_texts)]


def make_terms(n_terms: int, seed: int = 8) -> list[str]:
    rng = random.Random(seed)
    terms = set()
    while len(terms) < n_terms:
        terms.add("".join(rng.choice("abcdefghijklmnop") for _ in range(rng.randint(3, 8))))
    return sorted(terms)


def bench(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--texts", type=int, default=20_000)
    parser.add_argument("--terms", type=int, default=1_000)
    args = parser.parse_args()

    backends = available_backends()
    texts = make_corpus(args.texts)
    terms = make_terms(args.terms)
    mask = (1 << 20) - 1

    print(f"corpus: {len(texts)} texts, wordlist: {len(terms)} terms")
    print(f"{'kernel':<28}{'backend':<10}{'seconds':>10}{'items/s':>14}")

    results: dict[tuple[str, str], float] = {}
    for name, impl in sorted(backends.items()):
        def run_featurize(impl=impl):
            for text in texts:
                impl.ngram_feature_counts(text, 3, 5, True, mask)

        seconds = bench(run_featurize)
        results[("featurize", name)] = seconds
        print(f"{'featurize (3..5-grams)':<28}{name:<10}{seconds:>10.3f}{len(texts) / seconds:>14.0f}")

    for name, impl in sorted(backends.items()):
        matcher = impl.PatternMatcher(terms)

        def run_match(matcher=matcher):
            for text in texts:
                matcher.best_match(text)

        seconds = bench(run_match)
        results[("match", name)] = seconds
        print(f"{'wordlist match':<28}{name:<10}{seconds:>10.3f}{len(texts) / seconds:>14.0f}")

    if len(backends) == 2:
        for kernel in ("featurize", "match"):
            speedup = results[(kernel, "pure")] / results[(kernel, "c")]
            print(f"{kernel}: compiled backend is {speedup:.1f}x faster")
    else:
        print("compiled backend not built; showing pure-Python numbers only")


if __name__ == "__main__":
    main()
