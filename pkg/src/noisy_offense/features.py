"""Hashed text features for the baseline classifier.

Features are hashed character n-grams plus (optionally) hashed word
unigrams, with occurrence counts as values. The hash is FNV-1a 64-bit
over the UTF-8 token bytes behind a namespace prefix (see _kernels.pure
for the exact scheme), reduced modulo the power-of-two feature_dim, so
feature indices are identical across runs, platforms, and backends.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .errors import ConfigError


@dataclass(frozen=True)
class BaselineHyperparams:
    """Feature-space and training settings for the linear baseline."""

    feature_dim: int = 1 << 20
    char_ngram_min: int = 3
    char_ngram_max: int = 5
    use_word_unigrams: bool = True
    epochs: int = 5
    learning_rate: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.feature_dim <= 0 or self.feature_dim & (self.feature_dim - 1):
            raise ConfigError(f"feature_dim {self.feature_dim} must be a power of two")
        if not 1 <= self.char_ngram_min <= self.char_ngram_max:
            raise ConfigError(
                f"need 1 <= char_ngram_min <= char_ngram_max, got "
                f"{self.char_ngram_min}..{self.char_ngram_max}"
            )
        if self.epochs < 1:
            raise ConfigError("epochs must be at least 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


def featurize(text: str, hp: BaselineHyperparams) -> dict[int, float]:
    """Sparse feature counts for a normalized text.

    Deterministic and order-independent; all indices lie below feature_dim.
    """
    return _kernels.ngram_feature_counts(
        text,
        hp.char_ngram_min,
        hp.char_ngram_max,
        hp.use_word_unigrams,
        hp.feature_dim - 1,
    )
