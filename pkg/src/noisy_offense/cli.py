"""Command-line orchestration of the pipeline.

Subcommands mirror the pipeline stages (sample, train, predict,
postprocess, evaluate, report, sweep) plus ``run``, which chains them
end to end. Two invocations with identical configuration and input bytes
produce identical output bytes: all randomness flows from one ``--seed``
(default: the NOISY_OFFENSE_SEED environment variable), and each stage
derives its own seed from it with a fixed stage tag.

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 adapter/protocol error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import shlex
import sys
from contextlib import contextmanager
from pathlib import Path

from .adapter import AdapterConfig, external_predict
from .classifier import (
    predict,
    load_model,
    read_predictions,
    save_model,
    train_baseline,
    write_predictions,
)
from .corpus import (
    SOURCE_NOISY,
    LabeledExample,
    load_gold_dataset,
    load_id_text_pairs,
    load_wordlist,
    write_gold_dataset,
)
from .errors import ConfigError, DataError, NoisyOffenseError, ProtocolError, SweepError
from .features import BaselineHyperparams
from .metrics import class_metrics, confusion, format_metrics, write_confusion_tsv
from .postprocess import apply_postprocess, read_override_log, write_override_log
from .report import (
    BucketConfig,
    bucket_false_positives,
    false_positives,
    format_bucket_assignments,
    render_report,
)
from .sampler import (
    SamplerConfig,
    format_summary,
    parse_summary,
    run_sampling,
    threshold_sweep,
)

SEED_ENV_VAR = "NOISY_OFFENSE_SEED"


def derive_seed(seed: int, stage: str) -> int:
    """Deterministic per-stage seed so stages reproduce in isolation."""
    digest = hashlib.sha256(f"{seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return 0


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            raise ConfigError(f"missing required option {flag}")


def _apply_config_file(parser: _Parser, argv: list[str]) -> list[str]:
    """Load --config JSON defaults; explicit flags still win."""
    path = None
    remaining = list(argv)
    for i, token in enumerate(remaining):
        if token == "--config":
            if i + 1 >= len(remaining):
                raise ConfigError("--config requires a path")
            path = remaining[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None:
        return remaining
    try:
        with open(path, encoding="utf-8") as fh:
            values = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {action.dest for action in parser._actions}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    parser.set_defaults(**values)
    return remaining


@contextmanager
def _stage(name: str):
    """Label failures with the pipeline stage that raised them."""
    try:
        yield
    except ProtocolError as exc:
        raise ProtocolError(f"stage {name}: {exc}") from exc
    except SweepError as exc:
        raise SweepError(f"stage {name}: {exc}") from exc
    except DataError as exc:
        raise DataError(f"stage {name}: {exc}") from exc
    except ConfigError as exc:
        raise ConfigError(f"stage {name}: {exc}") from exc


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--config", help="JSON file with option defaults; flags override")
    parser.add_argument("--seed", type=int, default=None, help=f"global seed (default: ${SEED_ENV_VAR} or 0)")


def _add_sampler_options(parser: _Parser) -> None:
    parser.add_argument("--input-a", help="noisy corpus TSV")
    parser.add_argument("--input-b", help="auxiliary clean corpus TSV (all rows labeled OFF)")
    parser.add_argument("--s-low", type=float, help="lower std_conf selection threshold")
    parser.add_argument("--s-high", type=float, help="upper std_conf selection threshold")
    parser.add_argument("--label-threshold", type=float, default=0.5, help="avg_conf >= threshold derives OFF")
    parser.add_argument("--no-balance", action="store_true", help="skip majority-class subsampling")


def _add_baseline_options(parser: _Parser) -> None:
    parser.add_argument("--feature-dim", type=int, default=1 << 20)
    parser.add_argument("--ngram-min", type=int, default=3)
    parser.add_argument("--ngram-max", type=int, default=5)
    parser.add_argument("--no-word-unigrams", action="store_true")
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--learning-rate", type=float, default=0.1)


def _sampler_config(args: argparse.Namespace, seed: int) -> SamplerConfig:
    _require(args, "s_low", "s_high")
    return SamplerConfig(
        std_low=args.s_low,
        std_high=args.s_high,
        label_threshold=args.label_threshold,
        seed=derive_seed(seed, "sample"),
        balance=not args.no_balance,
    )


def _baseline_hyperparams(args: argparse.Namespace, seed: int) -> BaselineHyperparams:
    return BaselineHyperparams(
        feature_dim=args.feature_dim,
        char_ngram_min=args.ngram_min,
        char_ngram_max=args.ngram_max,
        use_word_unigrams=not args.no_word_unigrams,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=derive_seed(seed, "train"),
    )


def _training_examples(path: str) -> list[LabeledExample]:
    return [
        LabeledExample(rec.id, rec.text, rec.label, SOURCE_NOISY)
        for rec in load_gold_dataset(path)
    ]


def _write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_sample(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    config = _sampler_config(args, seed)
    _require(args, "input_a", "input_b", "out")
    examples, summary = run_sampling(config, args.input_a, args.input_b)
    write_gold_dataset(examples, args.out)
    text = format_summary(summary)
    if args.summary:
        _write_text(args.summary, text)
    sys.stdout.write(text)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    _require(args, "train", "model_out")
    hp = _baseline_hyperparams(args, seed)
    examples = _training_examples(args.train)
    model = train_baseline(examples, hp)
    save_model(model, args.model_out)
    print(f"trained on {len(examples)} examples -> {args.model_out}")
    return 0


def _predict_pairs(args: argparse.Namespace, pairs: list[tuple[str, str]]):
    if (args.model is None) == (args.adapter_cmd is None):
        raise ConfigError("select exactly one backend: --model or --adapter-cmd")
    if args.model is not None:
        model = load_model(args.model)
        return [predict(model, rec_id, text) for rec_id, text in pairs]
    config = AdapterConfig(
        command=tuple(shlex.split(args.adapter_cmd)), timeout=args.timeout
    )
    return external_predict(config, pairs)


def cmd_predict(args: argparse.Namespace) -> int:
    _require(args, "input", "out")
    pairs = load_id_text_pairs(args.input)
    predictions = _predict_pairs(args, pairs)
    write_predictions(predictions, args.out)
    print(f"wrote {len(predictions)} predictions -> {args.out}")
    return 0


def cmd_postprocess(args: argparse.Namespace) -> int:
    _require(args, "predictions", "out")
    predictions = read_predictions(args.predictions)
    if args.wordlist is None:
        # pass-through mode: no wordlist means the stage is disabled
        entries = []
        output = predictions
    else:
        _require(args, "texts")
        texts = dict(load_id_text_pairs(args.texts))
        wordlist = load_wordlist(args.wordlist)
        output, entries = apply_postprocess(predictions, texts, wordlist)
    write_predictions(output, args.out)
    if args.log:
        write_override_log(entries, args.log)
    print(f"overrides: {sum(1 for e in entries if e.changed)} changed, {len(entries)} matched")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    _require(args, "gold", "predictions")
    gold = load_gold_dataset(args.gold)
    predictions = read_predictions(args.predictions)
    cm = confusion(gold, predictions)
    metrics = class_metrics(cm)
    text = format_metrics(metrics) + cm.to_tsv()
    if args.out:
        _write_text(args.out, text)
    if args.confusion:
        write_confusion_tsv(cm, args.confusion)
    sys.stdout.write(text)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    _require(args, "gold", "predictions")
    gold = load_gold_dataset(args.gold)
    predictions = read_predictions(args.predictions)
    cm = confusion(gold, predictions)
    metrics = class_metrics(cm)
    override_log = read_override_log(args.override_log) if args.override_log else []
    summary = None
    if args.summary:
        with open(args.summary, encoding="utf-8") as fh:
            summary = parse_summary(fh.read(), path=args.summary)
    fps = false_positives(gold, predictions)
    buckets = bucket_false_positives(
        fps, BucketConfig(min_tokens=args.min_tokens), override_log
    )
    text = render_report(summary, cm, metrics, buckets, override_log)
    if args.out:
        _write_text(args.out, text)
    if args.buckets:
        _write_text(args.buckets, format_bucket_assignments(buckets))
    sys.stdout.write(text)
    return 0


def _parse_candidates(raw: str) -> list[tuple[float, float]]:
    candidates = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        low, sep, high = chunk.partition(":")
        if not sep:
            raise ConfigError(f"candidate {chunk!r} must look like low:high")
        try:
            candidates.append((float(low), float(high)))
        except ValueError:
            raise ConfigError(f"candidate {chunk!r} has non-numeric bounds") from None
    if not candidates:
        raise ConfigError("no candidates given")
    return candidates


def cmd_sweep(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    _require(args, "input_a", "input_b", "dev_gold", "candidates")
    candidates = _parse_candidates(args.candidates)
    dev = load_gold_dataset(args.dev_gold)
    hp = _baseline_hyperparams(args, seed)

    def train_and_eval(low: float, high: float) -> float:
        config = SamplerConfig(
            std_low=low,
            std_high=high,
            label_threshold=args.label_threshold,
            seed=derive_seed(seed, "sample"),
            balance=not args.no_balance,
        )
        examples, _ = run_sampling(config, args.input_a, args.input_b)
        model = train_baseline(examples, hp)
        predictions = [predict(model, rec.id, rec.text) for rec in dev]
        return class_metrics(confusion(dev, predictions)).macro_f1

    ranked = threshold_sweep(candidates, train_and_eval, args.budget, derive_seed(seed, "sweep"))
    print("s_low\ts_high\tmacro_f1")
    for (low, high), f1 in ranked:
        print(f"{low}\t{high}\t{f1:.4f}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    _require(args, "input_a", "input_b", "gold", "outdir")
    if args.adapter_cmd is not None and args.model is not None:
        raise ConfigError("select exactly one backend: baseline (default) or --adapter-cmd")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    with _stage("sample"):
        config = _sampler_config(args, seed)
        examples, summary = run_sampling(config, args.input_a, args.input_b)
        write_gold_dataset(examples, outdir / "sampled.tsv")
        _write_text(outdir / "sample_summary.txt", format_summary(summary))

    gold = load_gold_dataset(args.gold)
    pairs = [(rec.id, rec.text) for rec in gold]

    if args.adapter_cmd is None:
        with _stage("train"):
            hp = _baseline_hyperparams(args, seed)
            model = train_baseline(examples, hp)
            save_model(model, outdir / "model.txt")
        with _stage("predict"):
            predictions = [predict(model, rec_id, text) for rec_id, text in pairs]
    else:
        with _stage("predict"):
            adapter = AdapterConfig(
                command=tuple(shlex.split(args.adapter_cmd)), timeout=args.timeout
            )
            predictions = external_predict(adapter, pairs)
    write_predictions(predictions, outdir / "predictions.tsv")

    with _stage("postprocess"):
        if args.wordlist:
            wordlist = load_wordlist(args.wordlist)
            final, override_log = apply_postprocess(predictions, dict(pairs), wordlist)
        else:
            final, override_log = predictions, []
        write_predictions(final, outdir / "postprocessed.tsv")
        write_override_log(override_log, outdir / "override_log.tsv")

    with _stage("evaluate"):
        cm = confusion(gold, final)
        metrics = class_metrics(cm)
        _write_text(outdir / "evaluation.txt", format_metrics(metrics) + cm.to_tsv())
        write_confusion_tsv(cm, outdir / "confusion.tsv")

    with _stage("report"):
        fps = false_positives(gold, final)
        buckets = bucket_false_positives(
            fps, BucketConfig(min_tokens=args.min_tokens), override_log
        )
        report_text = render_report(summary, cm, metrics, buckets, override_log)
        _write_text(outdir / "report.txt", report_text)
        _write_text(outdir / "buckets.tsv", format_bucket_assignments(buckets))

    sys.stdout.write(report_text)
    print(f"macro_f1\t{metrics.macro_f1:.4f}")
    return 0


def _build_parser(command: str) -> tuple[_Parser, object]:
    parser = _Parser(prog=f"noisy-offense {command}")
    _add_common(parser)
    if command == "sample":
        _add_sampler_options(parser)
        parser.add_argument("--out", help="sampled training TSV (gold format)")
        parser.add_argument("--summary", help="also write the summary block here")
        return parser, cmd_sample
    if command == "train":
        _add_baseline_options(parser)
        parser.add_argument("--train", help="training TSV (gold format)")
        parser.add_argument("--model-out", help="model file to write")
        return parser, cmd_train
    if command == "predict":
        parser.add_argument("--model", help="baseline model file")
        parser.add_argument("--adapter-cmd", help="external adapter command line")
        parser.add_argument("--timeout", type=float, default=30.0)
        parser.add_argument("--input", help="TSV with id/text columns (gold or noisy format)")
        parser.add_argument("--out", help="predictions TSV")
        return parser, cmd_predict
    if command == "postprocess":
        parser.add_argument("--predictions", help="predictions TSV to post-process")
        parser.add_argument("--texts", help="TSV providing the tweet text for every id")
        parser.add_argument("--wordlist", help="wordlist file (omit to disable the stage)")
        parser.add_argument("--out", help="post-processed predictions TSV")
        parser.add_argument("--log", help="override log TSV")
        return parser, cmd_postprocess
    if command == "evaluate":
        parser.add_argument("--gold", help="gold TSV")
        parser.add_argument("--predictions", help="predictions TSV")
        parser.add_argument("--out", help="also write the metrics block here")
        parser.add_argument("--confusion", help="also write the 2x2 confusion TSV here")
        return parser, cmd_evaluate
    if command == "report":
        parser.add_argument("--gold", help="gold TSV")
        parser.add_argument("--predictions", help="predictions TSV")
        parser.add_argument("--override-log", help="override log TSV from postprocess")
        parser.add_argument("--summary", help="sampling summary block")
        parser.add_argument("--buckets", help="write per-id bucket TSV here")
        parser.add_argument("--out", help="write the report here")
        parser.add_argument("--min-tokens", type=int, default=5)
        return parser, cmd_report
    if command == "sweep":
        _add_baseline_options(parser)
        parser.add_argument("--input-a", help="noisy corpus TSV")
        parser.add_argument("--input-b", help="auxiliary clean corpus TSV")
        parser.add_argument("--dev-gold", help="development gold TSV to rank candidates on")
        parser.add_argument("--candidates", help="comma-separated low:high interval list")
        parser.add_argument("--budget", type=int, default=8)
        parser.add_argument("--label-threshold", type=float, default=0.5)
        parser.add_argument("--no-balance", action="store_true")
        return parser, cmd_sweep
    if command == "run":
        _add_sampler_options(parser)
        _add_baseline_options(parser)
        parser.add_argument("--gold", help="gold test TSV")
        parser.add_argument("--wordlist", help="wordlist file (omit to disable postprocess)")
        parser.add_argument("--model", help=argparse.SUPPRESS)  # reserved: reuse a trained model
        parser.add_argument("--adapter-cmd", help="serve predictions from this adapter instead")
        parser.add_argument("--timeout", type=float, default=30.0)
        parser.add_argument("--min-tokens", type=int, default=5)
        parser.add_argument("--outdir", help="directory for all pipeline artifacts")
        return parser, cmd_run
    raise ConfigError(f"unknown command {command!r}")


COMMANDS = ("sample", "train", "predict", "postprocess", "evaluate", "report", "sweep", "run")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if not argv or argv[0] in ("-h", "--help"):
            print(f"usage: noisy-offense {{{','.join(COMMANDS)}}} [options]")
            print(__doc__)
            return 0
        command, rest = argv[0], argv[1:]
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r} (expected one of {', '.join(COMMANDS)})")
        parser, handler = _build_parser(command)
        rest = _apply_config_file(parser, rest)
        args = parser.parse_args(rest)
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoisyOffenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
