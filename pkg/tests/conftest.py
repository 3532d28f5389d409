import numpy as np
import pytest

from tomoqkd.source import SourceParams


def random_params(rng, ratio=(0.5, 2.0), g=(0.0, 0.3), V=(0.0, 1.0), F=(0.0, 1.0)):
    return SourceParams(*(float(rng.uniform(*r)) for r in (ratio, g, V, F)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
