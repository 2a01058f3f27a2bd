import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pts(*rows):
    """(coords, freqs) from ``(x, y, z, f)`` rows."""
    coords = np.array([r[:3] for r in rows], dtype=float)
    freqs = np.array([r[3] for r in rows], dtype=float)
    return coords, freqs


def line(*xs):
    return pts(*[(x, 0, 0, 1) for x in xs])


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
