import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from qpurify import BlochVector, PureState, from_bloch  # noqa: E402

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def bloch_vectors(draw, max_norm=1.0):
    v = np.array([draw(finite), draw(finite), draw(finite)])
    n = np.linalg.norm(v)
    r = draw(st.floats(0.0, max_norm))
    if n < 1e-9:
        return BlochVector(0.0, 0.0, 0.0)
    v = v / n * r
    return BlochVector(*v)


@st.composite
def density_matrices(draw):
    return from_bloch(draw(bloch_vectors()))


@st.composite
def pure_states(draw):
    re = st.floats(-1.0, 1.0, allow_nan=False)
    amps = [complex(draw(re), draw(re)) for _ in range(2)]
    if abs(amps[0]) + abs(amps[1]) < 1e-3:
        amps = [1.0, 0.0]
    return PureState(amps, normalize=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
