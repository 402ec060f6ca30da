# Version: v2.0
"""Tests for nilmoore.metrics — timing history and JSONL output."""

import json
import time
from unittest.mock import patch

from nilmoore import config
from nilmoore.metrics import _history, get_summary, record_computation, reset_history, timer


class TestTimer:
    def test_timer_records_elapsed(self):
        with timer() as t:
            time.sleep(0.01)
        assert t.elapsed_ms >= 5  # At least 5ms

    def test_timer_zero_for_instant(self):
        with timer() as t:
            pass
        assert t.elapsed_ms >= 0
        assert t.elapsed_ms < 100


class TestRecordComputation:
    def test_records_to_history(self):
        with patch("nilmoore.metrics._append_jsonl"):
            record_computation(kind="enumeration", elapsed_ms=12.34, window=16, classes=4)
        entry = _history["enumeration"][0]
        assert entry["type"] == "enumeration"
        assert entry["elapsed_ms"] == 12.3
        assert entry["window"] == 16
        assert entry["classes"] == 4

    def test_history_is_bounded(self):
        with patch("nilmoore.metrics._append_jsonl"):
            for i in range(250):
                record_computation(kind="cmd_mult", elapsed_ms=float(i))
        assert len(_history["cmd_mult"]) == 200
        assert _history["cmd_mult"][0]["elapsed_ms"] == 50.0

    def test_reset_history(self):
        with patch("nilmoore.metrics._append_jsonl"):
            record_computation(kind="spectrum", elapsed_ms=1.0)
        reset_history()
        assert get_summary() == {}


class TestSummary:
    def test_summary_stats(self):
        with patch("nilmoore.metrics._append_jsonl"):
            for ms in (10.0, 20.0, 30.0):
                record_computation(kind="cmd_spectrum", elapsed_ms=ms)
        summary = get_summary()["cmd_spectrum"]
        assert summary == {"count": 3, "avg_ms": 20.0, "min_ms": 10.0, "max_ms": 30.0}

    def test_empty_summary(self):
        assert get_summary() == {}


class TestJsonl:
    def test_writes_when_configured(self, tmp_path, monkeypatch):
        path = tmp_path / "logs" / "metrics.jsonl"
        monkeypatch.setattr(config, "METRICS_FILE", str(path))
        record_computation(kind="counterexample", elapsed_ms=5.0, count=18, mult="3")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        entry = json.loads(lines[0])
        assert entry["type"] == "counterexample"
        assert entry["count"] == 18

    def test_silent_when_unset(self, tmp_path, monkeypatch):
        monkeypatch.setattr(config, "METRICS_FILE", None)
        record_computation(kind="lattice_closure", elapsed_ms=1.0)
        assert list(tmp_path.iterdir()) == []

    def test_unwritable_path_is_ignored(self, tmp_path, monkeypatch):
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        monkeypatch.setattr(config, "METRICS_FILE", str(blocker / "metrics.jsonl"))
        record_computation(kind="lattice_closure", elapsed_ms=1.0)
        assert len(_history["lattice_closure"]) == 1
