import hypothesis
import numpy as np
import pytest

from scpn.config import ScenarioConfig
from scpn.sim import instantiate

hypothesis.settings.register_profile("fast", max_examples=25)
hypothesis.settings.register_profile("thorough", max_examples=300)
hypothesis.settings.load_profile("fast")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale experiment runs (minutes)")


@pytest.fixture(scope="session")
def small_cfg() -> ScenarioConfig:
    """6-satellite scenario used across scheduler and harness tests."""
    return ScenarioConfig(planes=3, sats_per_plane=2, master_seed=7)


@pytest.fixture(scope="session")
def small_constellation(small_cfg):
    return instantiate(small_cfg)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
