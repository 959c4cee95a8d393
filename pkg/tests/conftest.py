# tests/conftest.py
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from acc.analysis.steady_state import find_periodic_orbit  # noqa: E402
from acc.circuit.converter import build_buck_model  # noqa: E402
from acc.presets import preset_params  # noqa: E402


def example1(k: float):
    p = preset_params("example1", k=k)
    return p, build_buck_model(p)


@pytest.fixture(scope="session")
def ex1_params():
    return preset_params("example1")


@pytest.fixture(scope="session")
def ex1_model(ex1_params):
    return build_buck_model(ex1_params)


@pytest.fixture(scope="session")
def ex1_orbit(ex1_params, ex1_model):
    return find_periodic_orbit(ex1_model, ex1_params.u)


@pytest.fixture(scope="session")
def ex1_049():
    p, m = example1(0.49)
    return p, m


@pytest.fixture(scope="session")
def ex6_params():
    return preset_params("example6")


@pytest.fixture(scope="session")
def ex6_model(ex6_params):
    return build_buck_model(ex6_params)


@pytest.fixture(scope="session")
def ex6_orbit(ex6_params, ex6_model):
    return find_periodic_orbit(ex6_model, ex6_params.u)
