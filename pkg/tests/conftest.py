import math

import pytest

from qrext import fig1_state

LN2 = math.log(2.0)


def bits(x: float) -> float:
    """Convert nats to bits."""
    return x / LN2


@pytest.fixture(scope="session")
def fig1():
    return fig1_state()
