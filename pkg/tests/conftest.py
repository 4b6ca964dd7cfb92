import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "fixed",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fixed")

from acceptance_log import RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_lut(rng, plateaus: bool = True) -> np.ndarray:
    """Random monotone 256-entry LUT in [0, 255], optionally with flat runs."""
    steps = rng.exponential(1.0, 255)
    if plateaus:
        steps[rng.random(255) < 0.15] = 0.0
    y = np.concatenate([[0.0], np.cumsum(steps)])
    lo, hi = sorted(rng.uniform(0, 255, 2))
    y = lo + (hi - lo) * y / max(y[-1], 1e-12)
    return np.maximum.accumulate(np.clip(y, 0.0, 255.0))
