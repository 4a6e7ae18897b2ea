import numpy as np
import pytest
from hypothesis import strategies as st

from onlineap.instance import CostMatrix

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance-criterion outcome and fail the test if it did not pass."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        _VERDICTS.append((number, line))
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)


@st.composite
def cost_matrices(draw, min_n=1, max_n=6, max_value=50):
    n = draw(st.integers(min_n, max_n))
    flat = draw(st.lists(st.integers(0, max_value), min_size=n * n, max_size=n * n))
    return CostMatrix(np.array(flat, dtype=np.int64).reshape(n, n))


def line_metric(n, seed, span=1000):
    """Servers and requests at random integer points on a line; cost = distance."""
    rng = np.random.default_rng(seed)
    servers = rng.integers(0, span, n)
    requests = rng.integers(0, span, n)
    return CostMatrix(np.abs(servers[:, None] - requests[None, :]))
