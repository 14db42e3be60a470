import numpy as np
import pytest
from hypothesis import strategies as st

from vsloc.model import AttackSpec, ChannelParams, generate_measurements, make_anchors

coords = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
points = st.tuples(coords, coords)


def random_scene(rng, n=6, sigma=1.0, attack=None, k=10, area=25.0):
    params = ChannelParams(sigma_db=sigma)
    anchors = make_anchors(rng.uniform(0, area, (n, 2)))
    x = rng.uniform(0, area, 2)
    attack = attack or AttackSpec.none()
    meas = generate_measurements(x, anchors, params, attack, k, int(rng.integers(2**31)))
    return anchors, x, meas, params


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed at the end of the pytest run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
