import pytest

from icingplant.cli import shipped_path
from icingplant.fitting import synthesize_dataset
from icingplant.plant import PlantConfig, load_config
from icingplant.scenario import load_scenario


@pytest.fixture
def default_cfg():
    return PlantConfig()


@pytest.fixture(scope="session")
def shipped_cfg():
    return load_config(shipped_path("paper_iv.config.json"))


@pytest.fixture(scope="session")
def shipped_scenario():
    return load_scenario(shipped_path("paper_iv.scenario.json"))


@pytest.fixture(scope="session")
def synth_10k():
    return synthesize_dataset(10_000, seed=12345)


@pytest.fixture(scope="session")
def synth_1k():
    return synthesize_dataset(1_000, seed=7)
