import numpy as np
import pytest

from helpers import CALIBRATED_PEAK_CHI
from physics.params_modes import PhysicalConfig
from utils.config import SimulationConfig


@pytest.fixture
def sim_config() -> SimulationConfig:
    return SimulationConfig()


@pytest.fixture
def default_cfg(sim_config) -> PhysicalConfig:
    return sim_config.physical()


@pytest.fixture
def calibrated_config(sim_config) -> SimulationConfig:
    return sim_config.with_section("dipole", calibrate_peak_chi=CALIBRATED_PEAK_CHI)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
