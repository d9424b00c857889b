import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng, n, low=1e-2, high=1e2):
    """SPD matrix with log-uniform spectrum in [low, high] and a random eigenbasis."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    vals = np.exp(rng.uniform(np.log(low), np.log(high), n))
    return (q * vals) @ q.T


def random_congruence(rng, n, max_cond=100.0):
    """Invertible matrix with condition number at most ``max_cond``."""
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.exp(rng.uniform(0.0, np.log(max_cond), n))
    s[0], s[-1] = 1.0, max(s.max(), 1.0)
    return (u * s) @ v.T


def random_rotvec(rng, max_angle):
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    return axis * rng.uniform(0.0, max_angle)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
