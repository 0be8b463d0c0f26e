"""Linear logistic baseline: training, prediction, and model persistence.

The baseline is an online logistic-regression model over hashed n-gram
features. It exists so the whole pipeline trains and evaluates at desk
scale with no external dependencies; a heavyweight external model can be
plugged in through the adapter protocol instead (see adapter.py).

Model file format (text, UTF-8): a versioned header line
``noisy-offense-model v1``, then ``feature_dim``, ``bias`` and the
featurizer settings as key/value lines, a ``weights <count>`` line, and
one ``index\tweight`` pair per line. Floats are serialized with repr()
so a reload reproduces bit-identical predictions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import NOT, OFF, LabeledExample, normalize_text
from .errors import DataError, ModelFormatError
from .features import BaselineHyperparams, featurize

MODEL_HEADER = "noisy-offense-model v1"


@dataclass(frozen=True)
class Prediction:
    """Classifier output for one tweet; score is the probability of OFF."""

    id: str
    label: str
    score: float
    overridden: bool = False
    override_term: str | None = None

    def __post_init__(self):
        if self.label not in (OFF, NOT):
            raise ValueError(f"unknown label {self.label!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score!r} outside [0, 1]")
        if self.overridden and (self.override_term is None or self.label != OFF):
            raise ValueError("overridden predictions must carry a term and label OFF")


@dataclass(frozen=True)
class LinearModel:
    """Immutable trained model: sparse weights plus the featurizer settings."""

    feature_dim: int
    weights: Mapping[int, float]
    bias: float
    hyperparams: BaselineHyperparams = field(default_factory=BaselineHyperparams)

    def __post_init__(self):
        if any(not 0 <= index < self.feature_dim for index in self.weights):
            raise ValueError("weight index outside feature space")

    def score(self, text: str) -> float:
        """Probability of OFF for a raw (unnormalized) text."""
        features = featurize(normalize_text(text), self.hyperparams)
        return sigmoid(margin(self.weights, self.bias, features))


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def margin(weights: Mapping[int, float], bias: float, features: Mapping[int, float]) -> float:
    get = weights.get
    return bias + sum(value * get(index, 0.0) for index, value in features.items())


_LOSS_EPS = 1e-15  # clamp keeps the log finite on saturated predictions


def logistic_loss(
    weights: Mapping[int, float], bias: float, features: Mapping[int, float], y: float
) -> float:
    """Negative log-likelihood of one example (y = 1.0 for OFF, 0.0 for NOT)."""
    p = sigmoid(margin(weights, bias, features))
    p = min(max(p, _LOSS_EPS), 1.0 - _LOSS_EPS)
    return -math.log(p) if y else -math.log(1.0 - p)


def loss_gradient(
    weights: Mapping[int, float], bias: float, features: Mapping[int, float], y: float
) -> tuple[dict[int, float], float]:
    """Analytic gradient of logistic_loss: d/dw_i = (p - y) x_i, d/db = p - y."""
    p = sigmoid(margin(weights, bias, features))
    residual = p - y
    return {index: residual * value for index, value in features.items()}, residual


def train_baseline(
    examples: Sequence[LabeledExample], hp: BaselineHyperparams
) -> LinearModel:
    """Online logistic SGD over seeded-shuffled epochs. Deterministic.

    The step size decays harmonically per epoch (learning_rate / (1 + e)),
    which keeps late single examples from swinging the final weights and
    makes the result far less sensitive to the shuffle seed.

    Raises DataError when either class is missing: a single-class set has
    no decision boundary to learn.
    """
    if not examples:
        raise DataError("training set is empty")
    labels = {ex.label for ex in examples}
    if labels != {OFF, NOT}:
        raise DataError(
            f"training set must contain both classes, got only {sorted(labels)}"
        )

    data = [
        (featurize(normalize_text(ex.text), hp), 1.0 if ex.label == OFF else 0.0)
        for ex in examples
    ]
    weights: dict[int, float] = {}
    bias = 0.0
    rng = random.Random(hp.seed)
    order = list(range(len(data)))
    for epoch in range(hp.epochs):
        lr = hp.learning_rate / (1.0 + epoch)
        rng.shuffle(order)
        for position in order:
            features, y = data[position]
            residual = sigmoid(margin(weights, bias, features)) - y
            step = lr * residual
            for index, value in features.items():
                weights[index] = weights.get(index, 0.0) - step * value
            bias -= step
    return LinearModel(hp.feature_dim, weights, bias, hp)


def average_loss(model: LinearModel, examples: Iterable[LabeledExample]) -> float:
    """Mean logistic loss of a model over a set of examples."""
    total = 0.0
    count = 0
    for ex in examples:
        features = featurize(normalize_text(ex.text), model.hyperparams)
        total += logistic_loss(model.weights, model.bias, features, 1.0 if ex.label == OFF else 0.0)
        count += 1
    if count == 0:
        raise DataError("cannot average loss over an empty set")
    return total / count


def predict(model: LinearModel, record_id: str, text: str) -> Prediction:
    """Score one text; the 0.5 tie goes to OFF (err toward flagging)."""
    score = model.score(text)
    return Prediction(record_id, OFF if score >= 0.5 else NOT, score)


def save_model(model: LinearModel, path: str | Path) -> None:
    hp = model.hyperparams
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(MODEL_HEADER + "\n")
        fh.write(f"feature_dim\t{model.feature_dim}\n")
        fh.write(f"bias\t{model.bias!r}\n")
        fh.write(f"char_ngram_min\t{hp.char_ngram_min}\n")
        fh.write(f"char_ngram_max\t{hp.char_ngram_max}\n")
        fh.write(f"use_word_unigrams\t{int(hp.use_word_unigrams)}\n")
        fh.write(f"weights\t{len(model.weights)}\n")
        for index in sorted(model.weights):
            fh.write(f"{index}\t{model.weights[index]!r}\n")


def load_model(path: str | Path) -> LinearModel:
    """Load a model file; save/load round-trips to bit-identical predictions."""
    path = str(path)

    def scalar(line: str | None, key: str, lineno: int) -> str:
        if line is None:
            raise ModelFormatError(f"truncated model file (missing {key})", path=path, line=lineno)
        name, sep, value = line.partition("\t")
        if not sep or name != key:
            raise ModelFormatError(f"expected {key!r} line, found {line!r}", path=path, line=lineno)
        return value

    with open(path, encoding="utf-8", newline="") as fh:
        lines = iter(enumerate((raw.rstrip("\r\n") for raw in fh), start=1))

        def next_line() -> tuple[int, str | None]:
            try:
                lineno, line = next(lines)
                return lineno, line
            except StopIteration:
                return -1, None

        lineno, header = next_line()
        if header != MODEL_HEADER:
            raise ModelFormatError(
                f"expected header {MODEL_HEADER!r}, found {header!r}", path=path, line=1
            )
        try:
            lineno, line = next_line()
            feature_dim = int(scalar(line, "feature_dim", lineno))
            lineno, line = next_line()
            bias = float(scalar(line, "bias", lineno))
            lineno, line = next_line()
            ngram_min = int(scalar(line, "char_ngram_min", lineno))
            lineno, line = next_line()
            ngram_max = int(scalar(line, "char_ngram_max", lineno))
            lineno, line = next_line()
            unigrams = bool(int(scalar(line, "use_word_unigrams", lineno)))
            lineno, line = next_line()
            count = int(scalar(line, "weights", lineno))
        except ValueError as exc:
            raise ModelFormatError(f"malformed value: {exc}", path=path, line=lineno) from None

        weights: dict[int, float] = {}
        for _ in range(count):
            lineno, line = next_line()
            if line is None:
                raise ModelFormatError(
                    f"truncated weights section (expected {count}, got {len(weights)})",
                    path=path,
                )
            index_raw, sep, weight_raw = line.partition("\t")
            try:
                index, weight = int(index_raw), float(weight_raw)
            except ValueError:
                raise ModelFormatError(
                    f"malformed weight line {line!r}", path=path, line=lineno
                ) from None
            weights[index] = weight

    hp = BaselineHyperparams(
        feature_dim=feature_dim,
        char_ngram_min=ngram_min,
        char_ngram_max=ngram_max,
        use_word_unigrams=unigrams,
    )
    try:
        return LinearModel(feature_dim, weights, bias, hp)
    except ValueError as exc:
        raise ModelFormatError(str(exc), path=path) from None


PREDICTIONS_HEADER = "id\tlabel\tscore\toverridden\toverride_term"


def write_predictions(predictions: Iterable[Prediction], path: str | Path) -> int:
    """Write predictions as TSV; scores use repr() for exact reload."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(PREDICTIONS_HEADER + "\n")
        for pred in predictions:
            term = pred.override_term if pred.override_term is not None else ""
            flag = "true" if pred.overridden else "false"
            fh.write(f"{pred.id}\t{pred.label}\t{pred.score!r}\t{flag}\t{term}\n")
            count += 1
    return count


def read_predictions(path: str | Path) -> list[Prediction]:
    path = str(path)
    predictions = []
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != PREDICTIONS_HEADER:
            raise DataError(
                f"missing or wrong header (expected {PREDICTIONS_HEADER!r})", path=path, line=1
            )
        for lineno, raw in enumerate(fh, start=2):
            fields = raw.rstrip("\r\n").split("\t")
            if len(fields) != 5:
                raise DataError(
                    f"expected 5 tab-separated fields, got {len(fields)}", path=path, line=lineno
                )
            rec_id, label, score_raw, flag, term = fields
            if flag not in ("true", "false"):
                raise DataError(f"bad overridden flag {flag!r}", path=path, line=lineno)
            try:
                score = float(score_raw)
            except ValueError:
                raise DataError(f"unparsable score {score_raw!r}", path=path, line=lineno) from None
            try:
                predictions.append(
                    Prediction(rec_id, label, score, flag == "true", term or None)
                )
            except ValueError as exc:
                raise DataError(str(exc), path=path, line=lineno) from None
    return predictions
