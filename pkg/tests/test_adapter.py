"""Adapter wire protocol: client behavior and stub conformance."""

from __future__ import annotations

import sys
import textwrap

import pytest

from noisy_offense.adapter import AdapterClient, AdapterConfig, external_predict
from noisy_offense.corpus import NOT, OFF
from noisy_offense.errors import ConfigError, ProtocolError

from protocol_conformance import all_transcripts, run_transcript

STUB = (sys.executable, "-m", "noisy_offense.stub_adapter")


def stub_config(*extra, timeout=10.0):
    return AdapterConfig(command=STUB + extra, timeout=timeout)


def script_config(tmp_path, body, timeout=2.0):
    """An adapter implemented by an inline script, for misbehavior tests."""
    path = tmp_path / "adapter.py"
    path.write_text(textwrap.dedent(body), encoding="utf-8")
    return AdapterConfig(command=(sys.executable, str(path)), timeout=timeout)


HANDSHAKE_ONLY = """
    import sys, json
    sys.stdin.readline()
    print(json.dumps({"proto": 1, "name": "misbehaving"}), flush=True)
"""


class TestStubConformance:
    @pytest.mark.parametrize("transcript", all_transcripts(), ids=lambda p: p.stem)
    def test_transcript(self, transcript):
        run_transcript([*STUB, "--name", "fixture"], transcript)


class TestExternalPredict:
    def test_echo_stub_all_not(self):
        batch = [("a", "first text"), ("b", "second text"), ("c", "third")]
        predictions = external_predict(stub_config(), batch)
        assert [p.id for p in predictions] == ["a", "b", "c"]
        assert all(p.label == NOT and p.score == 0.0 for p in predictions)

    def test_out_of_order_responses_reordered(self):
        batch = [("a", "one"), ("b", "two"), ("c", "three")]
        predictions = external_predict(stub_config("--reverse"), batch)
        assert [p.id for p in predictions] == ["a", "b", "c"]

    def test_empty_batch(self):
        assert external_predict(stub_config(), []) == []

    def test_duplicate_request_ids_rejected(self):
        with pytest.raises(ConfigError):
            external_predict(stub_config(), [("a", "one"), ("a", "two")])

    def test_multiple_batches_one_client(self):
        with AdapterClient(stub_config()) as client:
            assert client.name == "stub"
            first = client.predict_batch([("a", "x")])
            second = client.predict_batch([("b", "y"), ("c", "z")])
        assert [p.id for p in first] == ["a"]
        assert [p.id for p in second] == ["b", "c"]

    def test_unknown_id_is_protocol_error(self, tmp_path):
        config = script_config(
            tmp_path,
            HANDSHAKE_ONLY
            + """
    for line in sys.stdin:
        req = json.loads(line)
        if req.get("end"):
            continue
        print(json.dumps({"id": "bogus", "label": "NOT", "score": 0.0}), flush=True)
""",
        )
        with pytest.raises(ProtocolError, match="unknown"):
            external_predict(config, [("a", "text")])

    def test_score_out_of_range_is_protocol_error(self, tmp_path):
        config = script_config(
            tmp_path,
            HANDSHAKE_ONLY
            + """
    for line in sys.stdin:
        req = json.loads(line)
        if req.get("end"):
            continue
        print(json.dumps({"id": req["id"], "label": "OFF", "score": 1.5}), flush=True)
""",
        )
        with pytest.raises(ProtocolError, match=r"\[0, 1\]"):
            external_predict(config, [("a", "text")])

    def test_malformed_response_line(self, tmp_path):
        config = script_config(
            tmp_path,
            HANDSHAKE_ONLY
            + """
    for line in sys.stdin:
        req = json.loads(line)
        if req.get("end"):
            continue
        print("not json at all", flush=True)
""",
        )
        with pytest.raises(ProtocolError, match="malformed"):
            external_predict(config, [("a", "text")])

    def test_timeout(self, tmp_path):
        config = script_config(
            tmp_path,
            HANDSHAKE_ONLY
            + """
    import time
    sys.stdin.readline()
    time.sleep(60)
""",
            timeout=0.5,
        )
        with pytest.raises(ProtocolError, match="no response"):
            external_predict(config, [("a", "text")])

    def test_early_exit_is_protocol_error(self, tmp_path):
        config = script_config(
            tmp_path,
            HANDSHAKE_ONLY
            + """
    sys.exit(0)
""",
        )
        with pytest.raises(ProtocolError):
            external_predict(config, [("a", "text")])

    def test_bad_handshake(self, tmp_path):
        config = script_config(
            tmp_path,
            """
    import sys, json
    sys.stdin.readline()
    print(json.dumps({"proto": 2, "name": "wrong"}), flush=True)
""",
        )
        with pytest.raises(ProtocolError, match="version"):
            external_predict(config, [("a", "text")])

    def test_unlaunchable_command(self):
        config = AdapterConfig(command=("/nonexistent/adapter-binary",), timeout=1.0)
        with pytest.raises(ProtocolError, match="launch"):
            external_predict(config, [("a", "text")])


class TestAdapterConfig:
    def test_timeout_positive(self):
        with pytest.raises(ConfigError):
            AdapterConfig(command=("x",), timeout=0)

    def test_transformer_defaults(self):
        config = AdapterConfig(command=("x",))
        assert config.epochs == 10
        assert config.warmup_steps == 1000
        assert config.batch_size == 8
        assert config.learning_rate == 2.0e-5
        assert config.sequence_length == 64
        assert config.adam_epsilon == 1.0e-8
