import numpy as np
import pytest

from nmwitness.dynamics import ENMParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def fig1_params():
    return ENMParams(alpha=2.0, c=0.5)


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(label: str, ok: bool, detail: str) -> None:
        line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
