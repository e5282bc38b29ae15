import math

import pytest
from hypothesis import strategies as st

from spinebalance import RobotGeometry

lengths = st.floats(min_value=0.005, max_value=0.5, allow_nan=False, allow_infinity=False)
strides = st.floats(min_value=-0.1, max_value=0.1, allow_nan=False, allow_infinity=False)
flexions = st.floats(min_value=-math.pi / 2, max_value=math.pi / 2, allow_nan=False, allow_infinity=False)


@st.composite
def geometries(draw):
    return RobotGeometry(draw(lengths), draw(lengths), draw(lengths), draw(lengths))


@pytest.fixture
def geom():
    return RobotGeometry()
