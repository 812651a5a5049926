import os

import pytest
from hypothesis import HealthCheck, settings

from stratex.core import Event, Step, Trajectory

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance tests append (criterion, passed, detail) here
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def traj(labels, env="pacman", rewards=None, seed=0):
    rewards = rewards or [0.0] * len(labels)
    steps = tuple(Step(None, "-", Event(env, lab), r) for lab, r in zip(labels, rewards))
    return Trajectory(steps, seed, env)


@pytest.fixture
def make_traj():
    return traj


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"AC{k:<2} {'PASS' if ok else 'FAIL'}  {detail}")
