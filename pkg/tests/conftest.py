import pytest

from mirrorpoly.corpus import examples


@pytest.fixture(scope="session")
def corpus():
    return examples()
