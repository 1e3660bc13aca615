import time
from pathlib import Path

import pytest

from quasicf.qpspec import load_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"


@pytest.fixture
def spec_path():
    def get(name: str) -> Path:
        return SPECS / f"{name}.json"

    return get


@pytest.fixture
def spec():
    def get(name: str):
        return load_spec(SPECS / f"{name}.json")

    return get


_ACCEPTANCE: list[str] = []


class _Criterion:
    def __init__(self, label: str):
        self.label = label
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        extra = "; ".join(self.details)
        line = f"{status} {self.label} ({elapsed:.2f}s){': ' + extra if extra else ''}"
        _ACCEPTANCE.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
