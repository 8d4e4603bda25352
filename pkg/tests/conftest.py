import random

import numpy as np
import pytest
from hypothesis import strategies as st

from hyperdet.cache import ContractorStore
from hyperdet.core import Hypermatrix


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def store():
    return ContractorStore()


small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def hypermatrices(draw, shape=None, max_order=3, max_side=3):
    if shape is None:
        order = draw(st.integers(1, max_order))
        shape = tuple(draw(st.integers(1, max_side)) for _ in range(order))
    size = int(np.prod(shape))
    data = draw(st.lists(small_ints, min_size=size, max_size=size))
    return Hypermatrix.from_flat(shape, data)


@st.composite
def cubical(draw, sides=(2, 3), orders=(2, 3, 4)):
    d = draw(st.sampled_from(sides))
    N = draw(st.sampled_from(orders))
    return draw(hypermatrices(shape=(d,) * N))
