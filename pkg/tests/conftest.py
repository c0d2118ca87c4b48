import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from caplab.channels import amplitude_damping, dephasing, depolarizing, erasure, identity
from caplab.verify import random_channel, random_density

settings.register_profile(
    "caplab", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("caplab")

seeds = st.integers(min_value=0, max_value=2**31 - 2)
dims = st.integers(min_value=1, max_value=4)


@st.composite
def densities(draw, dim=None):
    d = dim if dim is not None else draw(st.integers(1, 4))
    return random_density(d, draw(seeds))


@st.composite
def channels(draw, dim_in=None, dim_out=None):
    d_in = dim_in if dim_in is not None else draw(st.integers(1, 3))
    d_out = dim_out if dim_out is not None else draw(st.integers(1, 3))
    rank = draw(st.integers(1, 4))
    while d_out * rank < d_in:
        rank += 1
    return random_channel(d_in, d_out, rank, draw(seeds))


@pytest.fixture
def complete_dephasing():
    return dephasing(1.0)


@pytest.fixture
def fully_depolarizing():
    return depolarizing(1.0, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


CATALOG = [
    identity(2),
    depolarizing(0.3),
    dephasing(0.6),
    amplitude_damping(0.25),
    erasure(0.4),
]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
