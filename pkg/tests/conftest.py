"""Shared fixtures: scenarios sized for fast unit runs."""

from dataclasses import replace

import numpy as np
import pytest

from swarmfl.energy import ControlRequirements
from swarmfl.scenario import SaaConfig, SwarmScenario


@pytest.fixture(scope="session")
def default_scenario() -> SwarmScenario:
    return SwarmScenario().require_valid()


@pytest.fixture(scope="session")
def small_scenario(default_scenario) -> SwarmScenario:
    """Two followers and a small sample set, for optimizer-heavy tests."""
    return replace(
        default_scenario,
        n_followers=2,
        distances=(55.0, 75.0),
        control=ControlRequirements(tau=(0.05, 0.05)),
        saa=SaaConfig(samples_k=200, max_cycles=60, inner_tol=1e-9, xtol=1e-5),
        mc_runs=10,
    ).require_valid()


@pytest.fixture(scope="session")
def easy_scenario(default_scenario) -> SwarmScenario:
    """Huge bandwidth and no interference: every link always succeeds."""
    from swarmfl.channel import InterferenceField

    radio = replace(default_scenario.radio, bw_up=1e9, bw_down=1e9)
    return replace(
        default_scenario,
        radio=radio,
        uplink_interference=InterferenceField(()),
        downlink_interference=InterferenceField(()),
    ).require_valid()


@pytest.fixture(scope="session")
def default_problem(default_scenario):
    datasets, model = default_scenario.build_dataset()
    return datasets, model


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0xC0FFEE)
