"""Shared fixtures for the test suite."""

import sys

import numpy as np
import pytest

import pointneuron as pn
from pointneuron.model import InitRegion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines after capture is torn down."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT_LINES", ()) if mod else ()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def open_region():
    """A wide source plane with no exclusion hole, for small synthetic models."""
    return InitRegion(center=(0.0, 0.0, 0.0), size_x=9.0, size_y=9.0)


@pytest.fixture
def tiny_model():
    """Two neurons, fixed weights/positions, k = 2: small enough to check by hand."""
    weights = np.array([1.0 + 0.5j, -0.25 + 2.0j])
    biases = np.array([[2.0, 0.0, 0.0], [0.0, -1.5, 1.0]])
    return pn.PointNeuronModel(2.0, weights, biases)


@pytest.fixture
def tiny_obs():
    positions = np.array([[0.1, 0.2, 0.0], [-0.3, 0.1, 0.2], [0.0, -0.4, -0.1]])
    pressures = np.array([0.3 - 0.2j, -0.1 + 0.4j, 0.05 + 0.05j])
    return pn.Observations(positions, pressures)
