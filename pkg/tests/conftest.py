import numpy as np
import pytest

from irrepcore import build_cgc_table


@pytest.fixture(scope="session")
def table8():
    return build_cgc_table(8)


@pytest.fixture(scope="session")
def table4(table8):
    # a genuinely L=4 table (not a slice) for capacity-boundary tests
    return build_cgc_table(4)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240917)
