import cmath

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from schottky.moebius import MoebiusMap

coord = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, coord, coord)


settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")


@st.composite
def moebius_maps(draw):
    """Normalized maps with entries of moderate size (|a| bounded below, d solved from det = 1)."""
    a = draw(st.floats(0.3, 3)) * cmath.exp(1j * draw(st.floats(-3.2, 3.2)))
    b, c = draw(cplx), draw(cplx)
    return MoebiusMap(a, b, c, (1 + b * c) / a)


@st.composite
def loxodromic_maps(draw):
    """Conjugates of z -> k z with |k| far from 1."""
    mod = draw(st.floats(1.5, 6))
    arg = draw(st.floats(-3, 3))
    h = draw(moebius_maps())
    k = mod * cmath.exp(1j * arg)
    s = cmath.sqrt(k)
    return h @ MoebiusMap(s, 0, 0, 1 / s) @ h.inverse()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
