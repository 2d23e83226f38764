import pytest
from hypothesis import settings

from shintani_stark.stark import example_preset

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def preset():
    return example_preset()


@pytest.fixture(scope="session")
def group(preset):
    return preset.group


@pytest.fixture(scope="session")
def F(preset):
    return preset.field
