"""Shared fixtures and instance builders for the test suite."""

import numpy as np
import pytest
from hypothesis import settings

from sdpexact import model

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


def q(A, b, c):
    return model.QuadraticForm(np.asarray(A, dtype=float),
                               np.asarray(b, dtype=float), float(c))


def make_explicit_instance():
    """Norm objective, two concentric-hyperbola constraints; optimum 2 at the
    four corners (+-1, +-1)."""
    return model.QcqpInstance(
        2, q(np.eye(2), [0, 0], 0),
        (q(np.diag([-2.0, 1.0]), [0, 0], 1.0),
         q(np.diag([1.0, -2.0]), [0, 0], 1.0)))


def make_gtrs(seed):
    """Random diagonal objective over the unit ball (n = 2)."""
    rng = np.random.default_rng(seed)
    A = np.diag(rng.uniform(-1.0, 1.0, size=2))
    b = rng.uniform(-0.5, 0.5, size=2)
    return model.QcqpInstance(
        2, q(A, b, 0.0), (q(np.eye(2), [0, 0], -1.0),))


def make_separation_instance():
    """Norm objective with two diagonal constraints whose slice is hull-exact
    but whose constraint pair is not rank-one generated."""
    return model.QcqpInstance(
        2, q(np.eye(2), [0, 0], 0),
        (q(np.diag([-1.0, 1.0]), [0, 0], -1.0),
         q(np.diag([2.0, -1.0]), [0, 0], -1.0)))


def make_perspective_instance():
    """min x^2 subject to x(1-y) = 0 and y(1-y) = 0."""
    return model.QcqpInstance(
        2, q(np.diag([1.0, 0.0]), [0, 0], 0),
        (),
        (q([[0.0, -0.5], [-0.5, 0.0]], [0.5, 0.0], 0.0),
         q(np.diag([0.0, -1.0]), [0.0, 0.5], 0.0)))


def random_sym(rng, d):
    G = rng.standard_normal((d, d))
    return 0.5 * (G + G.T)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance scorecard after the run (capture hides it inline)."""
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.SCORECARD:
        terminalreporter.section("acceptance scorecard")
        for line in test_acceptance.SCORECARD:
            terminalreporter.write_line(line)


@pytest.fixture
def explicit_instance():
    return make_explicit_instance()


@pytest.fixture
def separation_instance():
    return make_separation_instance()


@pytest.fixture
def perspective_instance():
    return make_perspective_instance()
