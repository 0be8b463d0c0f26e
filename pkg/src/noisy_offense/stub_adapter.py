"""Minimal protocol-conformant adapter for tests and offline runs.

Run as ``python -m noisy_offense.stub_adapter``. Scores every request as
NOT with score 0.0. Flags:

- ``--name NAME``  model name reported in the handshake (default: stub)
- ``--reverse``    buffer each batch and answer in reverse order once the
                   end marker arrives (exercises the client's reordering)

Malformed request lines get ``{"id":null,"error":"malformed request line"}``
and the loop continues.
"""

from __future__ import annotations

import argparse
import json
import sys


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n")
    sys.stdout.flush()


def serve(name: str = "stub", reverse: bool = False) -> None:
    stdin = sys.stdin
    handshake = stdin.readline()
    if not handshake:
        return
    try:
        hello = json.loads(handshake)
        proto = hello.get("proto") if isinstance(hello, dict) else None
    except json.JSONDecodeError:
        proto = None
    if proto != 1:
        _emit({"id": None, "error": "unsupported protocol"})
        return
    _emit({"proto": 1, "name": name})

    pending: list[dict] = []
    for line in stdin:
        line = line.rstrip("\r\n")
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError
        except (json.JSONDecodeError, ValueError):
            _emit({"id": None, "error": "malformed request line"})
            continue
        if request.get("end") is True:
            for response in reversed(pending):
                _emit(response)
            pending.clear()
            continue
        record_id = request.get("id")
        if not isinstance(record_id, str) or "text" not in request:
            _emit({"id": None, "error": "malformed request line"})
            continue
        response = {"id": record_id, "label": "NOT", "score": 0.0}
        if reverse:
            pending.append(response)
        else:
            _emit(response)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="stub classifier adapter")
    parser.add_argument("--name", default="stub")
    parser.add_argument("--reverse", action="store_true")
    args = parser.parse_args(argv)
    serve(name=args.name, reverse=args.reverse)
    return 0


if __name__ == "__main__":
    sys.exit(main())
