# Version: v1.1
"""
nilmoore.metrics — Lightweight timing history for computations.

Collects timing data for:
- CLI subcommands (validate, mult, spectrum, counterexample, moore-check)
- Γ-orbit enumerations (window size, class count)
- Lattice-closure certification

Metrics are:
1. Logged as structured INFO lines for immediate visibility
2. Appended to a JSONL file when MOORE_METRICS_FILE is set
3. Held in memory for summary stats
"""

import json
import time
from collections import defaultdict
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from nilmoore import config
from nilmoore.config import logger

# ---------------------------------------------------------------------------
# In-memory rolling stats (last N entries per kind)
# ---------------------------------------------------------------------------
_MAX_HISTORY = 200
_history: dict[str, list[dict]] = defaultdict(list)


def _append_jsonl(entry: dict) -> None:
    """Append a metrics entry to the JSONL file, if one is configured."""
    if not config.METRICS_FILE:
        return
    try:
        path = Path(config.METRICS_FILE)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, default=str) + "\n")
    except OSError as e:
        logger.debug(f"metrics: failed to write JSONL: {e}")


def _store(kind: str, entry: dict) -> None:
    buf = _history[kind]
    buf.append(entry)
    if len(buf) > _MAX_HISTORY:
        buf[:] = buf[-_MAX_HISTORY:]
    _append_jsonl(entry)


# ---------------------------------------------------------------------------
# Timer context manager
# ---------------------------------------------------------------------------


@contextmanager
def timer():
    """Yield an object with `.elapsed_ms` populated on exit."""

    class _Timer:
        elapsed_ms: float = 0.0

    t = _Timer()
    start = time.monotonic()
    try:
        yield t
    finally:
        t.elapsed_ms = (time.monotonic() - start) * 1000


# ---------------------------------------------------------------------------
# Recording
# ---------------------------------------------------------------------------


def record_computation(*, kind: str, elapsed_ms: float, **fields: Any) -> None:
    """Record one computation event.

    Args:
        kind: Category, e.g. "cmd_mult" or "enumeration".
        elapsed_ms: Wall time of the computation.
        **fields: Extra JSON-serialisable facts (window size, class count, ...).
    """
    entry = {
        "type": kind,
        "ts": time.time(),
        "elapsed_ms": round(elapsed_ms, 1),
        **fields,
    }
    _store(kind, entry)
    extras = " | ".join(f"{k}={v}" for k, v in fields.items())
    logger.info(
        f"METRICS {kind}: {elapsed_ms:.0f}ms" + (f" | {extras}" if extras else "")
    )


# ---------------------------------------------------------------------------
# Summary / stats
# ---------------------------------------------------------------------------


def get_summary() -> dict:
    """Return count/avg/min/max elapsed time per recorded kind."""
    result: dict = {}
    for kind, entries in _history.items():
        if not entries:
            continue
        times = [e["elapsed_ms"] for e in entries]
        result[kind] = {
            "count": len(entries),
            "avg_ms": round(sum(times) / len(times), 1),
            "min_ms": round(min(times), 1),
            "max_ms": round(max(times), 1),
        }
    return result


def reset_history() -> None:
    """Clear the in-memory history. Useful for testing."""
    _history.clear()
