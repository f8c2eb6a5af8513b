import random

import pytest

from cartier_lab.rings import RingSpec
from cartier_lab.settings import CONFIG_ENV_VAR, JSON_ENV_VAR, LOG_LEVEL_ENV_VAR, load_settings


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Built-in defaults only; no environment overrides leak between tests."""
    for name in (CONFIG_ENV_VAR, JSON_ENV_VAR, LOG_LEVEL_ENV_VAR):
        monkeypatch.delenv(name, raising=False)
    load_settings.cache_clear()
    yield
    load_settings.cache_clear()


@pytest.fixture
def Z():
    return RingSpec.integers()


@pytest.fixture
def Q():
    return RingSpec.rationals()


@pytest.fixture
def rng():
    return random.Random(20240601)
