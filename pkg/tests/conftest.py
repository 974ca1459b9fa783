import pathlib

import pytest

import cbfrrt
from cbfrrt import harness

SCENARIO_DIR = pathlib.Path(cbfrrt.__file__).parent / "scenarios"


@pytest.fixture(scope="session")
def example1_file():
    return harness.load_scenario(SCENARIO_DIR / "example1.json")


@pytest.fixture(scope="session")
def example2_file():
    return harness.load_scenario(SCENARIO_DIR / "example2.json")
