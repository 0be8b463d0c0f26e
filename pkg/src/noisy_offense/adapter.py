"""Client for serving predictions from an external classifier process.

Wire protocol, line-delimited JSON over the child's stdin/stdout, UTF-8:

- handshake: host sends ``{"proto":1}``, adapter replies
  ``{"proto":1,"name":"<model name>"}``;
- request:   ``{"id":"<id>","text":"<text>"}``, one per line;
- response:  ``{"id":"<id>","label":"OFF"|"NOT","score":<real in [0,1]>}``;
- end of batch: host sends ``{"end":true}``; the adapter flushes every
  pending response before reading further.

Responses may arrive in any order; the client reorders them to request
order. Every protocol violation (timeout, malformed line, unknown id,
out-of-range score) raises ProtocolError naming the offending line —
there is never a partial silent result.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from .corpus import NOT, OFF
from .classifier import Prediction
from .errors import ConfigError, ProtocolError

PROTOCOL_VERSION = 1

# Fine-tuning settings forwarded to external transformer trainers; kept
# here so every consumer of the adapter boundary shares one set of defaults.
TRANSFORMER_EPOCHS = 10
TRANSFORMER_WARMUP_STEPS = 1000
TRANSFORMER_BATCH_SIZE = 8
TRANSFORMER_LEARNING_RATE = 2.0e-5
TRANSFORMER_SEQUENCE_LENGTH = 64
TRANSFORMER_ADAM_EPSILON = 1.0e-8


@dataclass(frozen=True)
class AdapterConfig:
    """How to launch and talk to an external classifier process."""

    command: tuple[str, ...]
    timeout: float = 30.0
    epochs: int = TRANSFORMER_EPOCHS
    warmup_steps: int = TRANSFORMER_WARMUP_STEPS
    batch_size: int = TRANSFORMER_BATCH_SIZE
    learning_rate: float = TRANSFORMER_LEARNING_RATE
    sequence_length: int = TRANSFORMER_SEQUENCE_LENGTH
    adam_epsilon: float = TRANSFORMER_ADAM_EPSILON

    def __post_init__(self):
        if not self.command:
            raise ConfigError("adapter command must be non-empty")
        if self.timeout <= 0:
            raise ConfigError("adapter timeout must be positive")


def encode_message(payload: dict) -> str:
    """Canonical compact JSON used on the wire (no spaces, UTF-8 verbatim)."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


class AdapterClient:
    """Owns one adapter process; concurrent batches are serialized.

    Use as a context manager; the child is terminated on exit.
    """

    def __init__(self, config: AdapterConfig):
        self.config = config
        self.name: str | None = None
        self._lock = threading.Lock()
        self._lines: queue.Queue[str | None] = queue.Queue()
        try:
            self._process = subprocess.Popen(
                list(config.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ProtocolError(f"cannot launch adapter {config.command!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._pump_stdout, daemon=True)
        self._reader.start()
        try:
            self._handshake()
        except Exception:
            self.close()
            raise

    def __enter__(self) -> AdapterClient:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def close(self) -> None:
        process = self._process
        if process.poll() is None:
            try:
                if process.stdin:
                    process.stdin.close()
            except OSError:
                pass
            try:
                process.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                process.kill()
                process.wait()

    def _pump_stdout(self) -> None:
        stdout = self._process.stdout
        assert stdout is not None
        for line in stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def _send(self, payload: dict) -> None:
        stdin = self._process.stdin
        assert stdin is not None
        try:
            stdin.write(encode_message(payload) + "\n")
            stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"adapter closed its input: {exc}") from exc

    def _receive(self) -> str:
        try:
            line = self._lines.get(timeout=self.config.timeout)
        except queue.Empty:
            raise ProtocolError(
                f"adapter produced no response within {self.config.timeout}s"
            ) from None
        if line is None:
            raise ProtocolError("adapter closed its output mid-conversation")
        return line.rstrip("\r\n")

    def _handshake(self) -> None:
        self._send({"proto": PROTOCOL_VERSION})
        line = self._receive()
        try:
            reply = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(f"malformed handshake reply: {line!r}") from None
        if not isinstance(reply, dict) or reply.get("proto") != PROTOCOL_VERSION:
            raise ProtocolError(f"handshake version mismatch: {line!r}")
        name = reply.get("name")
        if not isinstance(name, str) or not name:
            raise ProtocolError(f"handshake reply carries no model name: {line!r}")
        self.name = name

    def predict_batch(self, batch: Sequence[tuple[str, str]]) -> list[Prediction]:
        """Send a batch and return predictions in request order."""
        with self._lock:
            return self._predict_batch(batch)

    def _predict_batch(self, batch: Sequence[tuple[str, str]]) -> list[Prediction]:
        if not batch:
            return []
        order = [record_id for record_id, _ in batch]
        pending = set(order)
        if len(pending) != len(order):
            raise ConfigError("batch contains duplicate request ids")
        for record_id, text in batch:
            self._send({"id": record_id, "text": text})
        self._send({"end": True})

        received: dict[str, Prediction] = {}
        while pending:
            line = self._receive()
            received_id, prediction = _parse_response(line)
            if received_id not in pending:
                raise ProtocolError(f"response for unknown or duplicate id: {line!r}")
            pending.discard(received_id)
            received[received_id] = prediction
        return [received[record_id] for record_id in order]


def _parse_response(line: str) -> tuple[str, Prediction]:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError:
        raise ProtocolError(f"malformed response line: {line!r}") from None
    if not isinstance(payload, dict):
        raise ProtocolError(f"malformed response line: {line!r}")
    if "error" in payload:
        raise ProtocolError(f"adapter reported an error: {line!r}")
    record_id = payload.get("id")
    label = payload.get("label")
    score = payload.get("score")
    if not isinstance(record_id, str):
        raise ProtocolError(f"response id missing or not a string: {line!r}")
    if label not in (OFF, NOT):
        raise ProtocolError(f"response label must be OFF or NOT: {line!r}")
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise ProtocolError(f"response score missing or not numeric: {line!r}")
    if not 0.0 <= float(score) <= 1.0:
        raise ProtocolError(f"response score outside [0, 1]: {line!r}")
    return record_id, Prediction(record_id, label, float(score))


def external_predict(
    config: AdapterConfig, batch: Sequence[tuple[str, str]]
) -> list[Prediction]:
    """Launch an adapter, run one batch through it, and tear it down."""
    with AdapterClient(config) as client:
        return client.predict_batch(batch)
