import numpy as np
import pytest

from dickestark import dynamics

_CRITERIA = []
_EVOLUTIONS = []


@pytest.fixture(autouse=True)
def _conservation_watch(monkeypatch):
    """Record trace drift and minimum population of every evolution run by a test."""
    original = dynamics._clamped
    seen = []

    def watched(history):
        seen.append((float(np.max(np.abs(history.sum(axis=1) - 1.0))), float(history.min())))
        return original(history)

    monkeypatch.setattr(dynamics, "_clamped", watched)
    yield seen
    _EVOLUTIONS.extend(seen)
    for drift, low in seen:
        assert drift <= 1e-9, f"trace drift {drift:.3g} > 1e-9"
        assert low >= -1e-8, f"population {low:.3g} < -1e-8"


@pytest.fixture
def evolutions_so_far():
    return _EVOLUTIONS


@pytest.fixture
def criterion():
    """report(number, title, ok, detail) records a pass/fail line and asserts ok."""

    def report(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" -- {detail}" if detail else "")
        _CRITERIA.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
