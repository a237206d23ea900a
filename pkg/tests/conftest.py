import sys

import numpy as np
import pytest

from acrkit import models, parse_crn


@pytest.fixture
def toy():
    return models.toy_system(1.0, 2.0)


@pytest.fixture
def carbon():
    return models.carbon_gma_system()


@pytest.fixture
def toy_file():
    return models.fixture_path("toy.crn")


@pytest.fixture
def carbon_file():
    return models.fixture_path("carbon.crn")


@pytest.fixture
def params_file():
    return models.fixture_path("anderies.toml")


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def load_fixture(name):
    return parse_crn(models.fixture_text(name))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
