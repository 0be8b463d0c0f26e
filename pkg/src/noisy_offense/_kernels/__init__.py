"""Kernel backend selection: compiled extension when built, pure Python otherwise.

Set NOISY_OFFENSE_PURE=1 to force the pure backend even when the
extension is available (used by the benchmark and the equivalence tests).
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("NOISY_OFFENSE_PURE", "") not in ("", "0"):
    _impl = pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND: str = _impl.BACKEND
fnv1a64 = _impl.fnv1a64
ngram_feature_counts = _impl.ngram_feature_counts
PatternMatcher = _impl.PatternMatcher


def available_backends() -> dict[str, object]:
    """All importable backends by name ('pure' is always present)."""
    backends: dict[str, object] = {"pure": pure}
    try:
        from . import _speedups

        backends["c"] = _speedups
    except ImportError:
        pass
    return backends
