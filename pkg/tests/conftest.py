from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from heavyma.cadlag import StepFunction

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@st.composite
def step_functions(draw, max_jumps: int = 6, grid: int = 40, monotone: bool = False):
    """Step functions with jump times on a coarse grid so that ties across
    functions are common, and values drawn from a small integer-ish set."""
    k = draw(st.integers(0, max_jumps))
    ticks = draw(st.lists(st.integers(1, grid), min_size=k, max_size=k, unique=True))
    times = np.sort(np.array(ticks, dtype=float)) / grid
    vals = st.integers(-8, 8).map(lambda v: v / 2)
    if monotone:
        steps = draw(st.lists(st.integers(0, 6).map(lambda v: v / 2), min_size=k, max_size=k))
        x0 = draw(vals)
        return StepFunction(x0, times, x0 + np.cumsum(steps))
    return StepFunction(draw(vals), times, np.array(draw(st.lists(vals, min_size=k, max_size=k))))


def random_step(rng: np.random.Generator, max_jumps: int = 8, monotone: bool = False) -> StepFunction:
    k = int(rng.integers(0, max_jumps + 1))
    times = np.sort(rng.choice(np.arange(1, 101), size=k, replace=False)) / 100.0
    if monotone:
        inc = rng.exponential(1.0, size=k) * (rng.random(k) < 0.8)
        x0 = float(rng.normal())
        return StepFunction(x0, times, x0 + np.cumsum(inc))
    return StepFunction(float(rng.normal()), times, rng.normal(size=k) * 2.0)


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])
