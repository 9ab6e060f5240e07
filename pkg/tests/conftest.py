import pytest

from oracles import small_codes


@pytest.fixture(scope="session")
def codes_small():
    return small_codes()
