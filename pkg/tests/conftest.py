import numpy as np
import pytest

from recvae.data import planted_factor_data, split_users

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    """Print and remember one PASS/FAIL line, then assert it."""
    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


@pytest.fixture(scope="session")
def toy_data():
    matrix = planted_factor_data(n_users=240, n_items=40, seed=3, mean_interactions=10)
    return matrix, split_users(matrix, 30, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
