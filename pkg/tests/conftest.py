import numpy as np
import pytest

from mfwtnn.noise import low_rank_cube


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def clean_cube():
    """40 x 40 x 20 cube of tubal rank 3 in [0, 1]."""
    return low_rank_cube((40, 40, 20), rank=3, seed=0)


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
