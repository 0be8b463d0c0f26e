"""Offensive-language classification pipeline for noisy-confidence corpora.

Stages: confidence-interval sampling of trustworthy training rows, a
linear baseline classifier (or an external model behind a line-delimited
JSON adapter protocol), a wordlist override pass, and full evaluation
plus false-positive error analysis. The `noisy-offense` CLI chains them.
"""

from __future__ import annotations

from ._kernels import BACKEND as KERNEL_BACKEND
from .corpus import (
    GoldRecord,
    LabeledExample,
    NOT,
    OFF,
    TweetRecord,
    Wordlist,
    load_gold_dataset,
    load_noisy_dataset,
    load_wordlist,
    normalize_text,
)
from .classifier import LinearModel, Prediction, load_model, predict, save_model, train_baseline
from .features import BaselineHyperparams, featurize
from .adapter import AdapterClient, AdapterConfig, external_predict
from .metrics import ClassMetrics, ConfusionMatrix, benchmark_table, class_metrics, confusion
from .postprocess import OverrideLogEntry, apply_postprocess, matches_wordlist
from .report import BucketConfig, bucket_false_positives, false_positives, render_report
from .sampler import (
    SampleSummary,
    SamplerConfig,
    balance_classes,
    derive_label,
    filter_by_std,
    merge_auxiliary,
    run_sampling,
    threshold_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterClient",
    "AdapterConfig",
    "BaselineHyperparams",
    "BucketConfig",
    "ClassMetrics",
    "ConfusionMatrix",
    "GoldRecord",
    "KERNEL_BACKEND",
    "LabeledExample",
    "LinearModel",
    "NOT",
    "OFF",
    "OverrideLogEntry",
    "Prediction",
    "SampleSummary",
    "SamplerConfig",
    "TweetRecord",
    "Wordlist",
    "apply_postprocess",
    "balance_classes",
    "benchmark_table",
    "bucket_false_positives",
    "class_metrics",
    "confusion",
    "derive_label",
    "external_predict",
    "false_positives",
    "featurize",
    "filter_by_std",
    "load_gold_dataset",
    "load_model",
    "load_noisy_dataset",
    "load_wordlist",
    "matches_wordlist",
    "merge_auxiliary",
    "normalize_text",
    "predict",
    "render_report",
    "run_sampling",
    "save_model",
    "threshold_sweep",
    "train_baseline",
]
