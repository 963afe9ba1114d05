"""Shared fixtures: seeded RNG, random-parameter draws, verdict reporting.

All randomness is seeded so failures reproduce exactly.  The acceptance
tests record one verdict line each; printing them from inside a test would
be swallowed by capture, so they are replayed in the terminal summary.
"""

import numpy as np
import pytest

from magbattery import SystemParams

ACCEPTANCE_VERDICTS: list[str] = []


def record_verdict(line):
    ACCEPTANCE_VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


def _draw_params(rng, rate_high=2.0):
    # couplings, detunings, decay rates each uniform in [0, 2]
    d1, d2, d3 = rng.uniform(0.0, rate_high, 3)
    ga, gb, lam = rng.uniform(0.0, rate_high, 3)
    ka, kb, km, gam = rng.uniform(0.0, rate_high, 4)
    return SystemParams.from_detunings(
        d1, d2, d3,
        g_a=ga, g_b=gb, lam=lam,
        kappa_a=ka, kappa_b=kb, kappa_m=km, gamma=gam,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def draw_params():
    return _draw_params
